#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tensorpad {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Syntax error with a byte offset into the parsed text.
class ParseError : public Error {
public:
  ParseError(std::size_t position, const std::string& message)
      : Error("parse error at " + std::to_string(position) + ": " + message),
        position_(position), message_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& message() const noexcept { return message_; }

private:
  std::size_t position_;
  std::string message_;
};

} // namespace tensorpad

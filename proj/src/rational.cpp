#include "tensorpad/rational.hpp"

#include "tensorpad/error.hpp"

#include <cctype>

namespace tensorpad {

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw Error("rational with zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  std::size_t i = 0;
  auto digits = [&](std::size_t from) {
    std::size_t j = from;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    return j;
  };
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
  const std::size_t num_end = digits(i);
  if (num_end == i) throw Error("malformed rational '" + std::string(text) + "'");
  mpz_class num(std::string(text.substr(0, num_end)).c_str() + (text[0] == '+' ? 1 : 0));
  if (num_end == text.size()) return Rational(num, 1);
  if (text[num_end] != '/') throw Error("malformed rational '" + std::string(text) + "'");
  const std::size_t den_end = digits(num_end + 1);
  if (den_end == num_end + 1 || den_end != text.size())
    throw Error("malformed rational '" + std::string(text) + "'");
  mpz_class den(std::string(text.substr(num_end + 1)).c_str());
  if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw Error("division by zero");
  value_ /= o.value_;
  return *this;
}

std::string Rational::to_string() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::size_t Rational::hash() const {
  const std::size_t h1 = std::hash<std::string>{}(value_.get_num().get_str());
  const std::size_t h2 = std::hash<std::string>{}(value_.get_den().get_str());
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

} // namespace tensorpad

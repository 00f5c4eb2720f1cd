#pragma once

#include "tensorpad/error.hpp"
#include "tensorpad/expr.hpp"
#include "tensorpad/properties.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tensorpad {

/// Looks up a bound expression for "@(label)" splices.
using LabelResolver = std::function<std::optional<Expression>(std::string_view label)>;

struct ParseOptions {
  LabelResolver resolve;
};

/// Parses the TeX-like input language into a normalized expression.
///
/// Names are control sequences (\partial) or a letter followed by letters and
/// digits (q12); a trailing '#' marks a pattern family. _{...} and ^{...}
/// attach index children, space separated. (...) or {...} directly after a
/// name attach arguments; so does (...) after whitespace when the name is a
/// control sequence that already carries indices. Juxtaposition binds
/// tighter than + and -; '=' and '->' build rules; commas build lists.
Expression parse(std::string_view text, const ParseOptions& options = {});

enum class LineKind { PropertyDeclaration, Assignment, Command, ExpressionLiteral };

struct Declaration {
  std::vector<Pattern> patterns;
  std::string property;
  std::vector<PropertyArg> args;
};

struct CommandArg {
  char open = '(';  // '(' or '{'
  std::string text;
};

struct Command {
  std::string name;
  bool repeat = false;     // "!" suffix
  bool post_rule = false;  // "@@" prefix
  std::string target;      // text inside the first (...) group; may be empty
  std::vector<CommandArg> args;
};

struct SourceLine {
  LineKind kind = LineKind::ExpressionLiteral;
  std::string payload;  // the statement without its terminator
  bool echo = true;     // ';' (or none) echoes, '.' is silent
  std::optional<Declaration> declaration;
  std::string label;                     // assignments
  std::optional<Expression> expression;  // assignments and literals
  std::optional<Command> command;
};

/// Decodes one logical line. Throws ParseError for unknown shapes.
SourceLine parse_line(std::string_view text, const ParseOptions& options = {});

/// Parses "@name!(target)(args){args}" (used for PostDefaultRules too).
Command parse_command(std::string_view text);

/// Splits a script into logical statements ending at top-level ';' or '.'.
/// Lines starting with '#' are comments. Each piece carries the 1-based line
/// number where it starts.
struct Statement {
  std::string text;
  std::size_t line = 0;
};
std::vector<Statement> split_statements(std::string_view script);

/// Deterministic plain rendering; parse(print_tex(e)) reproduces e.
std::string print_tex(const Expression& e);
/// Rendering for a math display (\frac, \{ \}); not meant to be reparsed.
std::string print_display_tex(const Expression& e);

} // namespace tensorpad

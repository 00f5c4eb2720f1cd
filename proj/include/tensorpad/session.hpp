#pragma once

#include "tensorpad/expr.hpp"
#include "tensorpad/notation.hpp"
#include "tensorpad/properties.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tensorpad {

/// What one statement printed. `plain` is empty for silent statements.
struct EvalOutput {
  std::string plain;
  std::string tex;
};

struct HistoryEntry {
  std::string input;
  std::string output;
};

/// Named expressions, the property registry and the default rule list.
/// Every statement either succeeds completely or leaves the session as it was.
class Session {
public:
  Session() = default;

  /// Evaluates one statement (declaration, assignment, command or bare
  /// expression). Throws Error or ParseError and keeps the old state.
  EvalOutput eval_line(std::string_view text);

  /// Splits the text into statements and evaluates them in turn; stops at the
  /// first error, which carries the 1-based line number.
  std::vector<EvalOutput> eval_text(std::string_view text);

  /// Turns the standard post rules (prodsort, rename_dummies, canonicalise,
  /// collect_terms) on or off.
  void set_default_rules(bool enabled);
  bool default_rules_enabled() const noexcept { return state_.post_rules_enabled; }

  const PropertyRegistry& registry() const noexcept { return state_.registry; }
  const std::map<std::string, Expression>& bindings() const noexcept { return state_.bindings; }
  std::optional<Expression> lookup(std::string_view label) const;
  /// Label that "%" stands for; empty before the first expression.
  const std::string& current() const noexcept { return state_.current; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }

private:
  struct State {
    PropertyRegistry registry;
    std::map<std::string, Expression> bindings;
    std::string current;
    std::vector<Command> post_rules;
    bool post_rules_enabled = false;
    std::size_t anonymous = 0;
  };

  Expression run_command(State& st, const Command& cmd, const std::string& target) const;
  Expression apply_once(State& st, const Command& cmd, const Expression& e) const;
  Expression apply_post_rules(State& st, Expression e) const;
  std::string resolve_label(const State& st, const std::string& text) const;
  ParseOptions parse_options(const State& st) const;
  EvalOutput render(const std::string& label, const Expression& e, bool echo, bool anonymous) const;

  State state_;
  std::vector<HistoryEntry> history_;
};

struct ScriptOptions {
  bool keep_going = false;
};

/// Runs a script file. Printed output goes to `transcript`, errors (with line
/// numbers) to `errors`. Returns 0 on success, 1 if any statement failed,
/// 2 when the file cannot be read.
int run_script(Session& session, const std::string& path, const ScriptOptions& options,
               std::ostream& transcript, std::ostream& errors);
int run_script_text(Session& session, std::string_view text, const ScriptOptions& options,
                    std::ostream& transcript, std::ostream& errors);

/// Newline-delimited JSON service. Input {"id": n, "body": "..."} yields a
/// busy status, then one {"id","kind":"output","body","tex"} or
/// {"id","kind":"error","body"}, then an idle status. Returns at end of input.
void serve_protocol(Session& session, std::istream& in, std::ostream& out);

} // namespace tensorpad

#include "tensorpad/session.hpp"

#include "tensorpad/algorithms.hpp"
#include "tensorpad/error.hpp"
#include "tensorpad/indices.hpp"
#include "tensorpad/symmetry.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace tensorpad {

namespace {

constexpr int kFixpointCap = 100;

const std::set<std::string>& idempotent_commands() {
  static const std::set<std::string> names{"substitute", "distribute",   "prodrule",  "canonicalise",
                                           "collect_terms", "prodsort", "indexsort", "rename_dummies"};
  return names;
}

const std::set<std::string>& known_commands() {
  static const std::set<std::string> names{
      "substitute", "distribute",  "prodrule", "canonicalise",   "collect_terms",  "prodsort",
      "indexsort",  "rename_dummies", "asym",  "all_contractions", "decompose",    "list_sum",
      "pintegrate", "vary",        "young_project", "reduce_sum", "properties"};
  return names;
}

const std::set<std::string>& unimplemented_commands() {
  static const std::set<std::string> names{"join", "rewrite_diracbar", "spinorsort"};
  return names;
}

std::string canonical_name(const std::string& name) {
  if (name == "rename") return "rename_dummies";
  if (name == "canonicalize") return "canonicalise";
  return name;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '{' || c == '(' || c == '[') ++depth;
    if (c == '}' || c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

// "{^{m}, _n, p}" -> slot specs.
std::vector<SlotSpec> parse_slot_specs(std::string_view text) {
  std::string s = trim(text);
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = s.substr(1, s.size() - 2);
  std::vector<SlotSpec> out;
  for (auto item : split_commas(s)) {
    SlotSpec spec;
    if (!item.empty() && (item[0] == '^' || item[0] == '_')) {
      spec.rel = item[0] == '^' ? ParentRel::Superscript : ParentRel::Subscript;
      item = trim(item.substr(1));
    }
    if (item.size() >= 2 && item.front() == '{' && item.back() == '}') item = trim(item.substr(1, item.size() - 2));
    if (item.empty()) throw Error("asym: empty index in slot list");
    spec.name = item;
    out.push_back(std::move(spec));
  }
  return out;
}

std::string describe(const PropertyRegistry::Entry& e) {
  std::string s = e.pattern.text() + "::" + std::string(property_kind_name(e.record.kind));
  if (!e.record.args.empty()) {
    s += "(";
    for (std::size_t i = 0; i < e.record.args.size(); ++i) {
      if (i) s += ", ";
      if (!e.record.args[i].key.empty()) s += e.record.args[i].key + "=";
      s += e.record.args[i].value;
    }
    s += ")";
  }
  return s;
}

Expression decompose_terms(const Expression& e, const MonomialBasis& basis, const PropertyRegistry& reg) {
  auto as_list = [&](const ExprNode& term) {
    std::vector<ExprNode> items;
    for (const auto& c : decompose(term, basis, reg)) items.push_back(make_number(c));
    return make_list(std::move(items));
  };
  if (!e.is_sum()) return as_list(e);
  std::vector<ExprNode> lists;
  for (const auto& t : e.children) lists.push_back(as_list(t));
  ExprNode out = make_sum(std::move(lists));
  return out;
}

} // namespace

std::optional<Expression> Session::lookup(std::string_view label) const {
  const std::string key = label == "%" ? state_.current : std::string(label);
  if (auto it = state_.bindings.find(key); it != state_.bindings.end()) return it->second;
  return std::nullopt;
}

void Session::set_default_rules(bool enabled) {
  state_.post_rules_enabled = enabled;
  if (enabled && state_.post_rules.empty()) {
    for (const char* text : {"@@prodsort!(%)", "@@rename_dummies!(%)", "@@canonicalise!(%)", "@@collect_terms!(%)"})
      state_.post_rules.push_back(parse_command(text));
  }
}

std::string Session::resolve_label(const State& st, const std::string& text) const {
  const std::string t = trim(text);
  const std::string key = t.empty() || t == "%" ? st.current : t;
  if (key.empty()) throw Error("no current expression");
  if (!st.bindings.contains(key)) throw Error("unknown label '" + t + "'");
  return key;
}

ParseOptions Session::parse_options(const State& st) const {
  ParseOptions opt;
  opt.resolve = [&st](std::string_view label) -> std::optional<Expression> {
    const std::string key = label == "%" ? st.current : std::string(label);
    if (auto it = st.bindings.find(key); it != st.bindings.end()) return it->second;
    return std::nullopt;
  };
  return opt;
}

Expression Session::apply_once(State& st, const Command& cmd, const Expression& e) const {
  const auto& reg = st.registry;
  const std::string name = canonical_name(cmd.name);
  const auto opt = parse_options(st);
  auto arg_text = [&](const char* what) -> std::string {
    if (cmd.args.empty()) throw Error(cmd.name + ": missing " + what);
    return cmd.args.front().text;
  };
  auto rules = [&] { return RuleSet::from_expression(parse(arg_text("rules"), opt), reg); };

  if (name == "substitute") return substitute(e, rules(), reg).expression;
  if (name == "vary") return vary(e, rules(), reg);
  if (name == "distribute") return distribute(e);
  if (name == "prodrule") return prodrule(e, reg);
  if (name == "canonicalise") return canonicalise(e, reg);
  if (name == "collect_terms") return collect_terms(e);
  if (name == "prodsort") return prodsort(e, reg);
  if (name == "indexsort") return indexsort(e, reg);
  if (name == "rename_dummies") return rename_dummies(e, reg);
  if (name == "list_sum") return list_sum(e, reg);
  if (name == "young_project") return young_project(e, reg);
  if (name == "reduce_sum") return reduce_sum(e, reg);
  if (name == "asym") return asym(e, parse_slot_specs(arg_text("index list")), reg);
  if (name == "pintegrate") {
    std::string d = trim(arg_text("derivative symbol"));
    if (d.size() >= 2 && d.front() == '{' && d.back() == '}') d = trim(d.substr(1, d.size() - 2));
    return pintegrate(e, parse(d).name, reg);
  }
  if (name == "all_contractions") {
    std::vector<ExprNode> items;
    for (auto& c : all_contractions(e, reg)) items.push_back(std::move(c));
    return normalize(make_list(std::move(items)));
  }
  if (name == "decompose") {
    const std::string text = trim(arg_text("basis"));
    Expression b;
    if (auto it = st.bindings.find(text); it != st.bindings.end()) b = it->second;
    else b = parse(text, opt);
    std::vector<Expression> elements;
    if (b.is_list()) {
      for (const auto& c : b.children) elements.push_back(c);
    } else {
      elements.push_back(b);
    }
    const MonomialBasis basis = build_basis(elements, reg);
    return decompose_terms(e, basis, reg);
  }
  throw Error("unknown command '" + cmd.name + "'");
}

namespace {

bool contains_rule(const Expression& e) {
  if (e.is_rule()) return true;
  if (e.is_list()) return std::any_of(e.children.begin(), e.children.end(), contains_rule);
  return false;
}

// Throws for a term that uses an index name three or more times.
void check_indices(const Expression& e, const PropertyRegistry& reg) {
  if (e.is_sum() || e.is_list()) {
    for (const auto& c : e.children) check_indices(c, reg);
    return;
  }
  if (e.is_rule()) return;
  classify_indices(e, reg);
}

}  // namespace

Expression Session::apply_post_rules(State& st, Expression e) const {
  if (!st.post_rules_enabled) return e;
  for (const auto& rule : st.post_rules) {
    if (!known_commands().contains(canonical_name(rule.name)))
      throw Error("unknown command '" + rule.name + "' in default rules");
    Command c = rule;
    c.post_rule = false;
    c.repeat = false;
    e = apply_once(st, c, e);
  }
  return e;
}

Expression Session::run_command(State& st, const Command& cmd, const std::string& target) const {
  const std::string name = canonical_name(cmd.name);
  Expression e = st.bindings.at(target);
  if (!cmd.repeat || !idempotent_commands().contains(name)) return apply_once(st, cmd, e);
  for (int i = 0; i < kFixpointCap; ++i) {
    Expression next = apply_once(st, cmd, e);
    if (equal_subtree(next, e, true)) return next;
    e = std::move(next);
  }
  throw Error(cmd.name + ": no fixpoint after " + std::to_string(kFixpointCap) + " applications");
}

EvalOutput Session::render(const std::string& label, const Expression& e, bool echo, bool anonymous) const {
  if (!echo) return {};
  EvalOutput out;
  out.plain = (anonymous ? std::string() : label + ":= ") + print_tex(e) + ";";
  out.tex = (anonymous ? std::string() : label + " = ") + print_display_tex(e);
  return out;
}

EvalOutput Session::eval_line(std::string_view text) {
  State st = state_;
  const ParseOptions opt = parse_options(st);
  SourceLine line = parse_line(text, opt);
  EvalOutput out;

  switch (line.kind) {
  case LineKind::PropertyDeclaration: {
    const Declaration& d = *line.declaration;
    if (d.property == "PostDefaultRules") {
      std::vector<Command> cmds;
      for (const auto& a : d.args) {
        Command c = parse_command(a.key.empty() ? a.value : a.key + "=" + a.value);
        if (!known_commands().contains(canonical_name(c.name))) throw Error("unknown command '" + c.name + "'");
        cmds.push_back(std::move(c));
      }
      st.post_rules = std::move(cmds);
      st.post_rules_enabled = !st.post_rules.empty();
      break;
    }
    const auto kind = property_kind_from_name(d.property);
    if (!kind) throw Error("unknown property '" + d.property + "'");
    if (d.patterns.empty()) throw Error(d.property + ": nothing to declare");
    st.registry.declare(d.patterns, make_record(*kind, d.args));
    break;
  }
  case LineKind::Assignment: {
    check_indices(*line.expression, st.registry);
    Expression value = contains_rule(*line.expression) ? *line.expression : apply_post_rules(st, *line.expression);
    st.bindings[line.label] = value;
    st.current = line.label;
    out = render(line.label, value, line.echo, false);
    break;
  }
  case LineKind::ExpressionLiteral: {
    check_indices(*line.expression, st.registry);
    Expression value = contains_rule(*line.expression) ? *line.expression : apply_post_rules(st, *line.expression);
    const std::string label = "%" + std::to_string(++st.anonymous);
    st.bindings[label] = value;
    st.current = label;
    out = render(label, value, line.echo, true);
    break;
  }
  case LineKind::Command: {
    const Command& cmd = *line.command;
    const std::string name = canonical_name(cmd.name);
    if (unimplemented_commands().contains(name)) throw Error("unimplemented command '" + cmd.name + "'");
    if (!known_commands().contains(name)) throw Error("unknown command '" + cmd.name + "'");
    if (name == "properties") {
      const Expression sym = parse(cmd.target, opt);
      std::string listing;
      for (const auto* e : st.registry.properties_of(sym)) listing += (listing.empty() ? "" : "\n") + describe(*e);
      if (listing.empty()) listing = print_tex(sym) + " has no properties";
      out.plain = listing;
      out.tex = listing;
      break;
    }
    const std::string target = resolve_label(st, cmd.target);
    Expression result = run_command(st, cmd, target);
    result = apply_post_rules(st, std::move(result));
    st.bindings[target] = result;
    st.current = target;
    out = render(target, result, line.echo, target.front() == '%');
    break;
  }
  }

  state_ = std::move(st);
  history_.push_back({std::string(text), out.plain});
  return out;
}

std::vector<EvalOutput> Session::eval_text(std::string_view text) {
  std::vector<EvalOutput> out;
  for (const auto& stmt : split_statements(text)) {
    try {
      out.push_back(eval_line(stmt.text));
    } catch (const Error& e) {
      throw Error("line " + std::to_string(stmt.line) + ": " + e.what());
    }
  }
  return out;
}

int run_script_text(Session& session, std::string_view text, const ScriptOptions& options,
                    std::ostream& transcript, std::ostream& errors) {
  int status = 0;
  for (const auto& stmt : split_statements(text)) {
    try {
      const EvalOutput r = session.eval_line(stmt.text);
      if (!r.plain.empty()) transcript << r.plain << '\n';
    } catch (const Error& e) {
      errors << "line " << stmt.line << ": " << e.what() << '\n';
      status = 1;
      if (!options.keep_going) break;
    }
  }
  transcript.flush();
  return status;
}

int run_script(Session& session, const std::string& path, const ScriptOptions& options, std::ostream& transcript,
               std::ostream& errors) {
  std::ifstream in(path);
  if (!in) {
    errors << "cannot read " << path << '\n';
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_script_text(session, buf.str(), options, transcript, errors);
}

void serve_protocol(Session& session, std::istream& in, std::ostream& out) {
  using nlohmann::json;
  auto send = [&](const json& j) { out << j.dump() << '\n' << std::flush; };
  std::optional<long long> last_id;
  std::string frame;
  while (std::getline(in, frame)) {
    if (trim(frame).empty()) continue;
    json msg = json::parse(frame, nullptr, false);
    json id = nullptr;
    if (msg.is_object() && msg.contains("id")) id = msg["id"];
    const bool well_formed = msg.is_object() && id.is_number_integer() && msg.contains("body") &&
                             msg["body"].is_string() && (!last_id || id.get<long long>() > *last_id);
    if (!well_formed) {
      send({{"id", id}, {"kind", "error"}, {"body", "bad message"}});
      continue;
    }
    last_id = id.get<long long>();
    send({{"kind", "status"}, {"body", "busy"}});
    try {
      std::string plain, tex;
      for (const auto& r : session.eval_text(msg["body"].get<std::string>())) {
        if (r.plain.empty()) continue;
        plain += (plain.empty() ? "" : "\n") + r.plain;
        tex += (tex.empty() ? "" : "\n") + r.tex;
      }
      send({{"id", id}, {"kind", "output"}, {"body", plain}, {"tex", tex}});
    } catch (const std::exception& e) {
      send({{"id", id}, {"kind", "error"}, {"body", e.what()}});
    }
    send({{"kind", "status"}, {"body", "idle"}});
  }
}

} // namespace tensorpad

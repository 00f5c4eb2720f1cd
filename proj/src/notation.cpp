#include "tensorpad/notation.hpp"

#include <cctype>
#include <regex>

namespace tensorpad {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

class Parser {
public:
  Parser(std::string_view text, const ParseOptions& options) : text_(text), options_(options) {}

  Expression parse_all() {
    skip_space();
    if (at_end()) throw ParseError(pos_, "empty expression");
    Expression e = parse_items(/*closing=*/'\0');
    skip_space();
    if (!at_end()) throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  // Skips whitespace and TeX spacing commands; returns whether anything was skipped.
  bool skip_space() {
    const std::size_t start = pos_;
    while (!at_end()) {
      if (is_space(peek())) {
        ++pos_;
      } else if (peek() == '\\' && (peek(1) == ',' || peek(1) == ';' || peek(1) == '!' || peek(1) == ' ')) {
        pos_ += 2;
      } else {
        break;
      }
    }
    return pos_ != start;
  }

  void expect(char c) {
    skip_space();
    if (at_end()) throw ParseError(pos_, std::string("expected '") + c + "' before end of input");
    if (peek() != c) throw ParseError(pos_, std::string("expected '") + c + "', found '" + peek() + "'");
    ++pos_;
  }

  // Comma separated items; more than one item yields a list node.
  Expression parse_items(char closing) {
    std::vector<Expression> items;
    skip_space();
    if (closing != '\0' && peek() == closing) return make_list({});
    items.push_back(parse_rule());
    skip_space();
    while (peek() == ',') {
      ++pos_;
      items.push_back(parse_rule());
      skip_space();
    }
    if (items.size() == 1) return std::move(items.front());
    return make_list(std::move(items));
  }

  Expression parse_rule() {
    Expression lhs = parse_sum();
    skip_space();
    std::string op;
    if (peek() == '=' ) {
      op = names::equals;
      ++pos_;
    } else if (peek() == '-' && peek(1) == '>') {
      op = names::arrow;
      pos_ += 2;
    } else {
      return lhs;
    }
    Expression rhs = parse_sum();
    Expression rule(op);
    rule.add(std::move(lhs), ParentRel::Argument);
    rule.add(std::move(rhs), ParentRel::Argument);
    return rule;
  }

  Expression parse_sum() {
    std::vector<Expression> terms;
    skip_space();
    bool negate = false;
    if (peek() == '+' || (peek() == '-' && peek(1) != '>')) {
      negate = peek() == '-';
      ++pos_;
    }
    for (;;) {
      Expression t = parse_product();
      if (negate) t.multiplier = -t.multiplier;
      terms.push_back(std::move(t));
      skip_space();
      if (peek() == '+') {
        negate = false;
      } else if (peek() == '-' && peek(1) != '>') {
        negate = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (terms.size() == 1) return std::move(terms.front());
    return make_sum(std::move(terms));
  }

  bool starts_factor() {
    skip_space();
    if (at_end()) return false;
    const char c = peek();
    if (c == '\\') return is_alpha(peek(1));
    return is_alpha(c) || is_digit(c) || c == '(' || c == '{' || c == '#' || (c == '@' && peek(1) == '(');
  }

  Expression parse_product() {
    std::vector<Expression> factors;
    const std::size_t start = pos_;
    while (starts_factor()) {
      if (peek() == '\\' && text_.substr(pos_, 4) == "\\int" && !is_alpha(peek(4))) {
        factors.push_back(parse_integral());
        continue;
      }
      factors.push_back(parse_factor());
    }
    if (factors.empty()) {
      if (at_end()) throw ParseError(pos_, "expected a term before end of input");
      throw ParseError(pos_ > start ? pos_ : start, std::string("unexpected '") + peek() + "'");
    }
    if (factors.size() == 1) return std::move(factors.front());
    return make_prod(std::move(factors));
  }

  Expression parse_number() {
    const std::size_t start = pos_;
    while (is_digit(peek())) ++pos_;
    std::string text(text_.substr(start, pos_ - start));
    if (peek() == '/') {
      ++pos_;
      const std::size_t den_start = pos_;
      while (is_digit(peek())) ++pos_;
      if (pos_ == den_start) throw ParseError(pos_, "malformed rational: missing denominator");
      const std::string den(text_.substr(den_start, pos_ - den_start));
      if (std::all_of(den.begin(), den.end(), [](char c) { return c == '0'; }))
        throw ParseError(den_start, "malformed rational: zero denominator");
      text += "/" + den;
    }
    return make_number(Rational::parse(text));
  }

  std::string parse_name() {
    const std::size_t start = pos_;
    if (peek() == '#') {
      ++pos_;
      return "#";
    }
    if (peek() == '\\') {
      ++pos_;
      if (!is_alpha(peek())) throw ParseError(pos_, "expected control sequence name");
      while (is_alpha(peek())) ++pos_;
    } else if (is_alpha(peek())) {
      ++pos_;
      while (is_alpha(peek()) || is_digit(peek())) ++pos_;
    } else {
      throw ParseError(pos_, "expected a name");
    }
    if (peek() == '#') ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Expression parse_splice() {
    const std::size_t at = pos_;
    pos_ += 2;  // "@("
    skip_space();
    const std::size_t start = pos_;
    while (!at_end() && peek() != ')') ++pos_;
    if (at_end()) throw ParseError(pos_, "unterminated @( reference");
    const std::string label = trim(text_.substr(start, pos_ - start));
    ++pos_;
    if (!options_.resolve) throw ParseError(at, "cannot resolve @(" + label + ") here");
    auto e = options_.resolve(label);
    if (!e) throw ParseError(at, "unknown label '" + label + "'");
    Expression copy = std::move(*e);
    copy.bracket = Bracket::Round;
    return copy;
  }

  Expression parse_factor() {
    skip_space();
    const char c = peek();
    if (is_digit(c)) return parse_number();
    if (c == '@') return parse_splice();
    if (c == '(') {
      ++pos_;
      Expression inner = parse_items(')');
      expect(')');
      inner.bracket = Bracket::Round;
      return inner;
    }
    if (c == '{') {
      ++pos_;
      Expression inner = parse_items('}');
      expect('}');
      if (!inner.is_list()) inner = make_list({std::move(inner)});
      return inner;
    }
    Expression node(parse_name());
    parse_tail(node);
    return node;
  }

  void parse_indices(Expression& node, ParentRel rel) {
    const std::size_t group_at = pos_;
    skip_space();
    if (peek() == '{') {
      ++pos_;
      std::size_t count = 0;
      for (;;) {
        skip_space();
        if (at_end()) throw ParseError(pos_, "unbalanced '{' in index group");
        if (peek() == '}') break;
        node.add(parse_index(), rel);
        ++count;
      }
      ++pos_;
      if (count == 0) throw ParseError(group_at, "empty index group");
      return;
    }
    if (at_end()) throw ParseError(pos_, "missing index after sub/superscript");
    if (is_digit(peek())) {
      Expression n(std::string(1, peek()));
      ++pos_;
      node.add(std::move(n), rel);
      return;
    }
    if (peek() == '\\' || peek() == '#') {
      node.add(parse_index(), rel);
      return;
    }
    if (is_alpha(peek())) {
      // A bare letter binds a single character (TeX convention), unless the
      // letter is followed by digits (generated names such as q2).
      std::size_t end = pos_ + 1;
      while (end < text_.size() && is_digit(text_[end])) ++end;
      if (end < text_.size() && text_[end] == '#') ++end;
      node.add(Expression(std::string(text_.substr(pos_, end - pos_))), rel);
      pos_ = end;
      return;
    }
    throw ParseError(pos_, "malformed index");
  }

  Expression parse_index() {
    if (is_digit(peek())) {
      const std::size_t start = pos_;
      while (is_digit(peek())) ++pos_;
      return Expression(std::string(text_.substr(start, pos_ - start)));
    }
    Expression idx(parse_name());
    if (peek() == '{' ) {
      ++pos_;
      Expression inner = parse_items('}');
      expect('}');
      inner.bracket = Bracket::Curly;
      idx.add(std::move(inner), ParentRel::Argument);
    }
    return idx;
  }

  void parse_tail(Expression& node) {
    bool has_indices = false;
    for (;;) {
      const std::size_t before = pos_;
      const bool spaced = skip_space();
      const char c = peek();
      if (c == '_' || c == '^') {
        ++pos_;
        parse_indices(node, c == '_' ? ParentRel::Subscript : ParentRel::Superscript);
        has_indices = true;
        continue;
      }
      if (!spaced && c == '{') {
        ++pos_;
        skip_space();
        if (peek() == '}') {  // TeX spacer as in T^{\mu}{}_{\nu}
          ++pos_;
          continue;
        }
        Expression inner = parse_items('}');
        expect('}');
        inner.bracket = Bracket::Curly;
        node.add(std::move(inner), ParentRel::Argument);
        continue;
      }
      const bool control = node.name.size() > 1 && node.name.front() == '\\';
      if (c == '(' && (!spaced || (control && has_indices))) {
        ++pos_;
        Expression inner = parse_items(')');
        expect(')');
        if (inner.is_list() && inner.bracket == Bracket::None) {
          for (auto& item : inner.children) {
            item.bracket = Bracket::Round;
            node.add(std::move(item), ParentRel::Argument);
          }
        } else {
          inner.bracket = Bracket::Round;
          node.add(std::move(inner), ParentRel::Argument);
        }
        continue;
      }
      pos_ = before;
      return;
    }
  }

  Expression parse_integral() {
    pos_ += 4;
    Expression node(names::integral);
    skip_space();
    static const std::regex measure(R"(^d\^(\{[^}]*\}|[A-Za-z0-9])[A-Za-z]+)");
    std::cmatch m;
    const std::string rest(text_.substr(pos_));
    if (std::regex_search(rest.c_str(), m, measure)) {
      node.add(Expression(m.str(0)), ParentRel::Argument);
      pos_ += static_cast<std::size_t>(m.length(0));
    }
    if (peek() == '{') {
      ++pos_;
      Expression inner = parse_items('}');
      expect('}');
      inner.bracket = Bracket::Curly;
      node.add(std::move(inner), ParentRel::Argument);
      return node;
    }
    std::vector<Expression> factors;
    while (starts_factor()) factors.push_back(parse_factor());
    if (factors.empty()) throw ParseError(pos_, "integral without integrand");
    Expression integrand = factors.size() == 1 ? std::move(factors.front()) : make_prod(std::move(factors));
    node.add(std::move(integrand), ParentRel::Argument);
    return node;
  }

  std::string_view text_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
};

// Finds a top-level occurrence of `needle` outside all brackets.
std::size_t find_top_level(std::string_view s, std::string_view needle) {
  int depth = 0;
  for (std::size_t i = 0; i + needle.size() <= s.size(); ++i) {
    const char c = s[i];
    if (c == '(' || c == '{' || c == '[') ++depth;
    else if (c == ')' || c == '}' || c == ']') --depth;
    else if (depth == 0 && s.substr(i, needle.size()) == needle) return i;
  }
  return std::string_view::npos;
}

std::vector<std::string> split_top_level(std::string_view s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(' || c == '{' || c == '[') ++depth;
    else if (c == ')' || c == '}' || c == ']') --depth;
    else if (c == sep && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  const auto last = trim(s.substr(start));
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

// Reads a balanced group starting at s[i] (which must be '(' or '{').
std::size_t match_group(std::string_view s, std::size_t i) {
  int depth = 0;
  for (std::size_t j = i; j < s.size(); ++j) {
    const char c = s[j];
    if (c == '(' || c == '{' || c == '[') ++depth;
    else if (c == ')' || c == '}' || c == ']') {
      --depth;
      if (depth == 0) return j;
    }
  }
  throw ParseError(s.size(), "unbalanced bracket");
}

bool valid_label(std::string_view s) {
  if (s.empty() || !(is_alpha(s.front()) || s.front() == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return is_alpha(c) || is_digit(c) || c == '_'; });
}

} // namespace

Expression parse(std::string_view text, const ParseOptions& options) {
  Parser p(text, options);
  return normalize(p.parse_all());
}

Command parse_command(std::string_view text) {
  const std::string s = trim(text);
  std::size_t i = 0;
  if (s.empty() || s[0] != '@') throw ParseError(0, "command must start with '@'");
  Command cmd;
  ++i;
  if (i < s.size() && s[i] == '@') {
    cmd.post_rule = true;
    ++i;
  }
  const std::size_t name_start = i;
  while (i < s.size() && (is_alpha(s[i]) || is_digit(s[i]) || s[i] == '_')) ++i;
  cmd.name = s.substr(name_start, i - name_start);
  if (cmd.name.empty()) throw ParseError(name_start, "missing command name");
  if (i < s.size() && s[i] == '!') {
    cmd.repeat = true;
    ++i;
  }
  bool first = true;
  for (;;) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size()) break;
    if (s[i] != '(' && s[i] != '{') throw ParseError(i, std::string("unexpected '") + s[i] + "' in command");
    const std::size_t close = match_group(s, i);
    std::string inner = trim(std::string_view(s).substr(i + 1, close - i - 1));
    if (first && s[i] == '(') {
      cmd.target = inner;
    } else {
      cmd.args.push_back(CommandArg{s[i], inner});
    }
    first = false;
    i = close + 1;
  }
  return cmd;
}

SourceLine parse_line(std::string_view text, const ParseOptions& options) {
  SourceLine line;
  std::string s = trim(text);
  if (!s.empty() && (s.back() == ';' || s.back() == '.')) {
    line.echo = s.back() == ';';
    s.pop_back();
    s = trim(s);
  }
  line.payload = s;
  if (s.empty()) throw ParseError(0, "empty line");

  if (s[0] == '@' && !(s.size() > 1 && s[1] == '(')) {
    line.kind = LineKind::Command;
    line.command = parse_command(s);
    return line;
  }

  if (const auto pos = find_top_level(s, "::"); pos != std::string::npos) {
    line.kind = LineKind::PropertyDeclaration;
    Declaration d;
    const std::string lhs = trim(std::string_view(s).substr(0, pos));
    std::string rhs = trim(std::string_view(s).substr(pos + 2));
    std::size_t name_end = 0;
    while (name_end < rhs.size() && (is_alpha(rhs[name_end]) || is_digit(rhs[name_end]))) ++name_end;
    d.property = rhs.substr(0, name_end);
    if (d.property.empty()) throw ParseError(pos + 2, "missing property name after '::'");
    const std::string rest = trim(std::string_view(rhs).substr(name_end));
    if (!rest.empty()) {
      if (rest.front() != '(' || rest.back() != ')')
        throw ParseError(pos + 2 + name_end, "property arguments must be enclosed in (...)");
      for (const auto& item : split_top_level(std::string_view(rest).substr(1, rest.size() - 2), ',')) {
        if (item.empty()) continue;
        const auto eq = find_top_level(item, "=");
        if (eq != std::string::npos && item.find("..") == std::string::npos)
          d.args.push_back(PropertyArg{trim(std::string_view(item).substr(0, eq)),
                                       trim(std::string_view(item).substr(eq + 1))});
        else
          d.args.push_back(PropertyArg{"", item});
      }
    }
    if (!lhs.empty()) {
      std::string inner = lhs;
      if (lhs.front() == '{' && match_group(lhs, 0) == lhs.size() - 1) inner = lhs.substr(1, lhs.size() - 2);
      for (const auto& item : split_top_level(inner, ',')) {
        if (item.empty()) throw ParseError(0, "empty pattern in declaration");
        d.patterns.emplace_back(parse(item, options));
      }
    }
    line.declaration = std::move(d);
    return line;
  }

  if (const auto pos = find_top_level(s, ":="); pos != std::string::npos) {
    line.kind = LineKind::Assignment;
    line.label = trim(std::string_view(s).substr(0, pos));
    if (!valid_label(line.label)) throw ParseError(0, "invalid label '" + line.label + "'");
    const std::string body = std::string(std::string_view(s).substr(pos + 2));
    try {
      line.expression = parse(body, options);
    } catch (const ParseError& e) {
      throw ParseError(pos + 2 + e.position(), e.message());
    }
    return line;
  }

  line.kind = LineKind::ExpressionLiteral;
  line.expression = parse(s, options);
  return line;
}

std::vector<Statement> split_statements(std::string_view script) {
  std::vector<Statement> out;
  std::string current;
  std::size_t line_no = 1;
  std::size_t start_line = 0;
  int depth = 0;
  bool at_line_start = true;
  for (std::size_t i = 0; i < script.size(); ++i) {
    const char c = script[i];
    if (at_line_start) {
      std::size_t j = i;
      while (j < script.size() && (script[j] == ' ' || script[j] == '\t')) ++j;
      if (j < script.size() && script[j] == '#') {
        while (j < script.size() && script[j] != '\n') ++j;
        i = j;
        if (i < script.size()) {
          ++line_no;
          current += ' ';
        }
        continue;
      }
      at_line_start = false;
    }
    if (c == '\n') {
      ++line_no;
      at_line_start = true;
      current += ' ';
      continue;
    }
    if (start_line == 0 && !is_space(c)) start_line = line_no;
    current += c;
    if (c == '(' || c == '{' || c == '[') ++depth;
    else if (c == ')' || c == '}' || c == ']') --depth;
    else if (depth <= 0 && (c == ';' || c == '.')) {
      out.push_back(Statement{trim(current), start_line});
      current.clear();
      start_line = 0;
      depth = 0;
    }
  }
  if (!trim(current).empty()) out.push_back(Statement{trim(current), start_line});
  return out;
}

namespace {

struct Printer {
  bool display = false;

  std::string rational(const Rational& r) const {
    if (!display || r.is_integer()) return r.to_string();
    const std::string sign = r.sign() < 0 ? "-" : "";
    return sign + "\\frac{" + r.abs().numerator().get_str() + "}{" + r.denominator().get_str() + "}";
  }

  // Term with its multiplier.
  std::string term(const ExprNode& e) const {
    if (e.is_number()) return rational(e.multiplier);
    std::string b = body(e);
    if (e.is_sum() && !e.multiplier.is_one()) b = "(" + b + ")";
    if (e.multiplier.is_one()) return b;
    if (e.multiplier == Rational(-1)) return "-" + b;
    return rational(e.multiplier) + " " + b;
  }

  std::string factor(const ExprNode& e) const {
    if (e.is_sum() || e.is_rule()) return "(" + term(e) + ")";
    if (!e.multiplier.is_one() && !e.is_number()) return "(" + term(e) + ")";
    if (e.is_number() && e.multiplier.sign() < 0) return "(" + term(e) + ")";
    return term(e);
  }

  std::string index(const ExprNode& e) const {
    std::string s = e.name;
    s += tail(e);
    return s;
  }

  std::string tail(const ExprNode& e) const {
    std::string s;
    std::size_t i = 0;
    const auto& ch = e.children;
    while (i < ch.size()) {
      const ExprNode& c = ch[i];
      if (c.is_index_slot()) {
        const ParentRel rel = c.rel;
        s += rel == ParentRel::Subscript ? "_{" : "^{";
        bool first = true;
        while (i < ch.size() && ch[i].rel == rel) {
          if (!first) s += ' ';
          s += index(ch[i]);
          first = false;
          ++i;
        }
        s += '}';
        continue;
      }
      if (c.bracket == Bracket::Curly) {
        s += "{" + inner(c) + "}";
        ++i;
        continue;
      }
      s += '(';
      bool first = true;
      while (i < ch.size() && ch[i].rel == ParentRel::Argument && ch[i].bracket != Bracket::Curly) {
        if (!first) s += ", ";
        s += inner(ch[i]);
        first = false;
        ++i;
      }
      s += ')';
    }
    return s;
  }

  // Contents of a bracket: lists inside brackets are printed without braces.
  std::string inner(const ExprNode& e) const {
    if (e.is_list() && e.multiplier.is_one()) {
      std::string s;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) s += ", ";
        s += term(e.children[i]);
      }
      return s.empty() ? "{}" : "{" + s + "}";
    }
    return term(e);
  }

  std::string integral(const ExprNode& e, bool bare_ok) const {
    std::string s = "\\int";
    for (const auto& c : e.children) {
      const bool measure = c.children.empty() && c.name.size() > 2 && c.name.compare(0, 2, "d^") == 0 &&
                           c.bracket == Bracket::None && &c == &e.children.front() && e.children.size() > 1;
      if (measure) {
        s += " " + c.name;
      } else if (c.bracket == Bracket::Curly || !bare_ok) {
        s += "{" + term(c) + "}";
      } else {
        s += " " + factor(c);
      }
    }
    return s;
  }

  std::string body(const ExprNode& e) const {
    if (e.is_number()) return rational(e.multiplier);
    if (e.is_sum()) {
      std::string s;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        std::string t = term(e.children[i]);
        if (i > 0) {
          if (!t.empty() && t.front() == '-') s += " - " + t.substr(1);
          else s += " + " + t;
        } else {
          s += t;
        }
      }
      return s;
    }
    if (e.is_prod()) {
      std::string s;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        const ExprNode& c = e.children[i];
        if (i) s += ' ';
        if (c.is_integral()) s += integral(c, i + 1 == e.children.size());
        else s += factor(c);
      }
      return s;
    }
    if (e.is_list()) {
      std::string s = display ? "\\{" : "{";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) s += ", ";
        s += term(e.children[i]);
      }
      s += display ? "\\}" : "}";
      return s;
    }
    if (e.is_rule()) {
      const std::string op = e.name == names::equals ? " = " : " -> ";
      return term(e.children.at(0)) + op + term(e.children.at(1));
    }
    if (e.is_integral()) return integral(e, true);
    return e.name + tail(e);
  }
};

} // namespace

std::string print_tex(const Expression& e) { return Printer{false}.term(e); }

std::string print_display_tex(const Expression& e) { return Printer{true}.term(e); }

} // namespace tensorpad

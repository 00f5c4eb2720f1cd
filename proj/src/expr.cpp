#include "tensorpad/expr.hpp"

#include "tensorpad/properties.hpp"

#include <cctype>

namespace tensorpad {

ExprNode make_number(const Rational& value) {
  ExprNode n(names::number);
  n.multiplier = value;
  return n;
}

ExprNode make_zero() { return make_number(Rational(0)); }

ExprNode make_symbol(std::string name) { return ExprNode(std::move(name)); }

ExprNode make_index(std::string name, ParentRel rel) { return ExprNode(std::move(name), rel); }

ExprNode make_tensor(std::string name, const std::vector<std::string>& subscripts) {
  ExprNode t(std::move(name));
  for (const auto& s : subscripts) t.add(make_index(s), ParentRel::Subscript);
  return t;
}

namespace {

ExprNode make_structural(const std::string& name, std::vector<ExprNode> children) {
  ExprNode n(name);
  n.children = std::move(children);
  for (auto& c : n.children) c.rel = ParentRel::Argument;
  return n;
}

void become_zero(ExprNode& e) {
  const ParentRel rel = e.rel;
  e = make_zero();
  e.rel = rel;
}

// Replaces e by its single child, keeping e's relation and folding multipliers.
void collapse_to(ExprNode& e, ExprNode child, const Rational& factor) {
  const ParentRel rel = e.rel;
  const Bracket bracket = e.bracket;
  child.multiplier *= factor;
  e = std::move(child);
  e.rel = rel;
  if (e.bracket == Bracket::None) e.bracket = bracket;
}

} // namespace

ExprNode make_sum(std::vector<ExprNode> terms) { return make_structural(names::sum, std::move(terms)); }
ExprNode make_prod(std::vector<ExprNode> factors) {
  return make_structural(names::prod, std::move(factors));
}
ExprNode make_list(std::vector<ExprNode> items) { return make_structural(names::list, std::move(items)); }

void normalize_in_place(ExprNode& e) {
  for (auto& c : e.children) normalize_in_place(c);
  if (e.is_index_slot()) return;
  if (e.multiplier.is_zero() && !e.is_list()) {
    become_zero(e);
    return;
  }

  if (e.is_sum()) {
    std::vector<ExprNode> terms;
    terms.reserve(e.children.size());
    for (auto& c : e.children) {
      if (c.is_sum()) {
        for (auto& g : c.children) {
          g.multiplier *= c.multiplier;
          terms.push_back(std::move(g));
        }
      } else {
        terms.push_back(std::move(c));
      }
    }
    std::vector<ExprNode> kept;
    kept.reserve(terms.size());
    for (auto& t : terms) {
      t.multiplier *= e.multiplier;
      if (t.is_zero()) continue;
      t.rel = ParentRel::Argument;
      kept.push_back(std::move(t));
    }
    if (kept.empty()) {
      become_zero(e);
    } else if (kept.size() == 1) {
      collapse_to(e, std::move(kept.front()), Rational(1));
    } else {
      e.children = std::move(kept);
      e.multiplier = Rational(1);
    }
    return;
  }

  if (e.is_prod()) {
    Rational factor = e.multiplier;
    std::vector<ExprNode> kept;
    kept.reserve(e.children.size());
    for (auto& c : e.children) {
      factor *= c.multiplier;
      if (c.is_prod()) {
        for (auto& g : c.children) {
          g.multiplier = Rational(1);
          g.rel = ParentRel::Argument;
          kept.push_back(std::move(g));
        }
      } else if (c.is_number()) {
        continue;
      } else {
        c.multiplier = Rational(1);
        c.rel = ParentRel::Argument;
        kept.push_back(std::move(c));
      }
    }
    if (factor.is_zero()) {
      become_zero(e);
    } else if (kept.empty()) {
      const ParentRel rel = e.rel;
      e = make_number(factor);
      e.rel = rel;
    } else if (kept.size() == 1) {
      collapse_to(e, std::move(kept.front()), factor);
    } else {
      e.children = std::move(kept);
      e.multiplier = factor;
    }
    return;
  }
}

ExprNode normalize(ExprNode e) {
  normalize_in_place(e);
  return e;
}

bool equal_subtree(const ExprNode& a, const ExprNode& b, bool compare_multiplier) {
  if (a.name != b.name || a.rel != b.rel || a.children.size() != b.children.size()) return false;
  if (compare_multiplier && a.multiplier != b.multiplier) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal_subtree(a.children[i], b.children[i], true)) return false;
  return true;
}

namespace {

void append_key(const ExprNode& e, bool include_multiplier, std::string& out) {
  switch (e.rel) {
    case ParentRel::Superscript: out += '^'; break;
    case ParentRel::Subscript: out += '_'; break;
    case ParentRel::Argument: out += '$'; break;
    case ParentRel::NoRelation: break;
  }
  if (include_multiplier && !e.multiplier.is_one()) {
    out += '[';
    out += e.multiplier.to_string();
    out += ']';
  }
  out += e.name;
  if (!e.children.empty()) {
    out += '(';
    for (const auto& c : e.children) {
      append_key(c, true, out);
      out += ',';
    }
    out += ')';
  }
}

} // namespace

std::string structure_key(const ExprNode& e, bool include_multiplier) {
  std::string out;
  append_key(e, include_multiplier, out);
  return out;
}

std::vector<ExprNode*> term_factors(ExprNode& term) {
  std::vector<ExprNode*> out;
  if (term.is_prod()) {
    for (auto& c : term.children) out.push_back(&c);
  } else {
    out.push_back(&term);
  }
  return out;
}

std::vector<const ExprNode*> term_factors(const ExprNode& term) {
  std::vector<const ExprNode*> out;
  if (term.is_prod()) {
    for (const auto& c : term.children) out.push_back(&c);
  } else {
    out.push_back(&term);
  }
  return out;
}

namespace {

void visit_terms(ExprNode& e, const std::function<void(ExprNode&)>& f) {
  if (e.is_sum() || e.is_list()) {
    for (auto& c : e.children) visit_terms(c, f);
    return;
  }
  f(e);
}

} // namespace

void for_each_term(ExprNode& e, const std::function<void(ExprNode&)>& f) {
  visit_terms(e, f);
  normalize_in_place(e);
}

std::size_t node_count(const ExprNode& e) {
  std::size_t n = 1;
  for (const auto& c : e.children) n += node_count(c);
  return n;
}

bool is_index(const ExprNode& child, const PropertyRegistry& reg) {
  if (!child.is_index_slot()) return false;
  if (child.is_number()) return false;
  if (!child.name.empty() && std::isdigit(static_cast<unsigned char>(child.name[0]))) return false;
  return !reg.has_direct(child, PropertyKind::NonIndex);
}

namespace {

template <typename Node, typename Out>
void collect_indices(Node& n, const PropertyRegistry& reg, Out& out) {
  const bool structural = n.is_prod() || n.is_sum() || n.is_integral();
  if (structural || reg.is_inheriting(n) || reg.is_derivative(n) ||
      reg.has_direct(n, PropertyKind::IndexInherit)) {
    for (auto& c : n.children)
      if (c.rel == ParentRel::Argument) collect_indices(c, reg, out);
  }
  for (auto& c : n.children)
    if (is_index(c, reg)) out.push_back(&c);
}

} // namespace

std::vector<const ExprNode*> index_iterator(const ExprNode& n, const PropertyRegistry& reg) {
  std::vector<const ExprNode*> out;
  collect_indices(n, reg, out);
  return out;
}

std::vector<ExprNode*> index_iterator(ExprNode& n, const PropertyRegistry& reg) {
  std::vector<ExprNode*> out;
  collect_indices(n, reg, out);
  return out;
}

} // namespace tensorpad

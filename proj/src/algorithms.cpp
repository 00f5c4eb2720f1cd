#include "tensorpad/algorithms.hpp"

#include "tensorpad/error.hpp"
#include "tensorpad/indices.hpp"
#include "tensorpad/notation.hpp"
#include "tensorpad/symmetry.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>

namespace tensorpad {

namespace {

std::set<std::string> free_set(const Expression& e, const PropertyRegistry& reg) {
  const auto names = classify_indices(e, reg).free_names();
  return {names.begin(), names.end()};
}

// Pattern index name -> target name. Different pattern names may bind the
// same target, so a pattern with two free indices also matches a trace.
struct Binding {
  std::map<std::string, std::string> names;

  bool bind(const std::string& pattern, const std::string& target) {
    auto [it, fresh] = names.emplace(pattern, target);
    return fresh || it->second == target;
  }

  std::set<std::string> values() const {
    std::set<std::string> out;
    for (const auto& [k, v] : names) out.insert(v);
    return out;
  }
};

bool compatible_sets(const std::string& pattern, const std::string& target, const PropertyRegistry& reg) {
  const IndexSet* ps = reg.index_set_of(pattern);
  const IndexSet* ts = reg.index_set_of(target);
  return ps == nullptr || ts == nullptr || ps == ts;
}

bool match_node(const ExprNode& p, const ExprNode& n, Binding& b, const PropertyRegistry& reg) {
  if (p.name != n.name || p.children.size() != n.children.size()) return false;
  if (p.is_number() && p.multiplier != n.multiplier) return false;
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    const ExprNode& pc = p.children[i];
    const ExprNode& nc = n.children[i];
    if (pc.rel != nc.rel) return false;
    if (pc.is_index_slot() && pc.children.empty() && is_index(pc, reg)) {
      if (!nc.children.empty() || !compatible_sets(pc.name, nc.name, reg)) return false;
      if (!b.bind(pc.name, nc.name)) return false;
    } else if (pc.is_index_slot()) {
      if (!equal_subtree(pc, nc, true)) return false;
    } else {
      if (pc.multiplier != nc.multiplier) return false;
      if (!match_node(pc, nc, b, reg)) return false;
    }
  }
  return true;
}

// Tries the node as it stands, then every slot arrangement its symmetry allows.
std::optional<std::pair<Binding, int>> match_rule(const Expression& lhs, const ExprNode& n,
                                                  const PropertyRegistry& reg) {
  if (lhs.name != n.name) return std::nullopt;
  {
    Binding b;
    if (match_node(lhs, n, b, reg)) return std::make_pair(std::move(b), 1);
  }
  const auto group = factor_symmetry(n, reg);
  for (std::size_t gi = 1; gi < group.size(); ++gi) {
    ExprNode image = n;
    auto slots = index_iterator(image, reg);
    std::vector<ExprNode> before;
    for (auto* s : slots) before.push_back(*s);
    for (std::size_t k = 0; k < slots.size() && k < group[gi].perm.size(); ++k)
      *slots[k] = before[static_cast<std::size_t>(group[gi].perm[k])];
    Binding b;
    if (match_node(lhs, image, b, reg)) return std::make_pair(std::move(b), group[gi].sign);
  }
  return std::nullopt;
}

Expression build_image(const Rule& rule, const Binding& b, std::set<std::string>& in_use,
                       const PropertyRegistry& reg) {
  Expression img = rule.rhs;
  const auto rhs_names = index_names(img, reg);
  const auto bound = b.values();
  std::set<std::string> taken = in_use;
  taken.insert(bound.begin(), bound.end());
  for (const auto& name : rhs_names)
    if (!b.names.contains(name)) taken.insert(name);
  std::map<std::string, std::string> renaming;
  for (const auto& name : rhs_names) {
    if (auto it = b.names.find(name); it != b.names.end()) {
      renaming[name] = it->second;
      continue;
    }
    if (!in_use.contains(name) && !bound.contains(name)) continue;
    const IndexSet* set = reg.index_set_of(name);
    if (set == nullptr) continue;
    const std::string fresh = fresh_dummy(*set, taken);
    taken.insert(fresh);
    renaming[name] = fresh;
  }
  rename_indices(img, renaming, reg);
  const auto now = index_names(img, reg);
  in_use.insert(now.begin(), now.end());
  return img;
}

std::optional<Expression> rewrite_with(const RuleSet& rules, const ExprNode& n, std::set<std::string>& in_use,
                                       const PropertyRegistry& reg) {
  for (const auto& rule : rules.rules) {
    auto m = match_rule(rule.lhs, n, reg);
    if (!m) continue;
    Expression img = build_image(rule, m->first, in_use, reg);
    img.multiplier *= n.multiplier * Rational(m->second);
    img.rel = n.rel;
    if (n.bracket != Bracket::None) img.bracket = n.bracket;
    return img;
  }
  return std::nullopt;
}

void substitute_in(ExprNode& n, const RuleSet& rules, std::set<std::string>& in_use, const PropertyRegistry& reg,
                   bool& applied) {
  if (n.is_index_slot()) return;
  if (auto img = rewrite_with(rules, n, in_use, reg)) {
    n = std::move(*img);
    applied = true;
    return;
  }
  for (auto& c : n.children) substitute_in(c, rules, in_use, reg, applied);
}

// Rational factors move out of derivatives, accents and integrals, which
// are all linear.
void hoist_constants(ExprNode& n, const PropertyRegistry& reg) {
  for (auto& c : n.children)
    if (!c.is_index_slot()) hoist_constants(c, reg);
  if (!(n.is_integral() || reg.is_derivative(n) || reg.is_inheriting(n))) return;
  for (auto& c : n.children) {
    if (c.rel != ParentRel::Argument || c.is_number() || c.multiplier == Rational(1)) continue;
    n.multiplier *= c.multiplier;
    c.multiplier = Rational(1);
  }
}

Expression tidy(Expression e, const PropertyRegistry& reg) {
  e = normalize(std::move(e));
  hoist_constants(e, reg);
  return normalize(std::move(e));
}

// Calls f on every top-level term, looking through sums and lists only.
template <class F>
void each_top_term(ExprNode& e, F&& f) {
  if (e.is_sum() || e.is_list()) {
    for (auto& c : e.children) each_top_term(c, f);
    return;
  }
  f(e);
}

ExprNode argument_holder(const ExprNode& node, const ExprNode& argument) {
  ExprNode out = node;
  for (auto& c : out.children) {
    if (c.rel != ParentRel::Argument) continue;
    const Bracket br = c.bracket;
    c = argument;
    c.rel = ParentRel::Argument;
    c.bracket = br == Bracket::None ? Bracket::Round : br;
    break;
  }
  return out;
}

std::optional<std::size_t> argument_slot(const ExprNode& node) {
  for (std::size_t i = 0; i < node.children.size(); ++i)
    if (node.children[i].rel == ParentRel::Argument) return i;
  return std::nullopt;
}

ExprNode as_term(std::vector<ExprNode> factors) {
  if (factors.empty()) return make_number(Rational(1));
  if (factors.size() == 1) return std::move(factors.front());
  return make_prod(std::move(factors));
}

bool constant_under(const std::vector<ExprNode>& factors, const std::string& derivative,
                    const PropertyRegistry& reg) {
  return std::all_of(factors.begin(), factors.end(),
                     [&](const ExprNode& f) { return reg.is_constant_under(f, derivative); });
}

ExprNode distribute_node(ExprNode e) {
  for (auto& c : e.children)
    if (!c.is_index_slot()) c = distribute_node(std::move(c));
  if (!e.is_prod()) return e;
  const bool has_sum = std::any_of(e.children.begin(), e.children.end(), [](const ExprNode& c) { return c.is_sum(); });
  if (!has_sum) return e;
  std::vector<std::vector<ExprNode>> partial{{}};
  for (const auto& f : e.children) {
    std::vector<std::vector<ExprNode>> next;
    if (f.is_sum()) {
      for (const auto& seq : partial) {
        for (const auto& t : f.children) {
          auto s = seq;
          ExprNode piece = t;
          piece.multiplier *= f.multiplier;
          s.push_back(std::move(piece));
          next.push_back(std::move(s));
        }
      }
    } else {
      for (auto seq : partial) {
        seq.push_back(f);
        next.push_back(std::move(seq));
      }
    }
    partial = std::move(next);
  }
  std::vector<ExprNode> terms;
  for (auto& seq : partial) terms.push_back(normalize(make_prod(std::move(seq))));
  ExprNode out = normalize(make_sum(std::move(terms)));
  out.multiplier *= e.multiplier;
  out.rel = e.rel;
  out.bracket = e.bracket;
  return out;
}

ExprNode prodrule_node(ExprNode e, const PropertyRegistry& reg) {
  for (auto& c : e.children)
    if (!c.is_index_slot()) c = prodrule_node(std::move(c), reg);
  if (!reg.is_derivative(e)) return e;
  const auto slot = argument_slot(e);
  if (!slot || !e.children[*slot].is_prod()) return e;
  const ExprNode arg = e.children[*slot];
  std::vector<ExprNode> terms;
  for (std::size_t i = 0; i < arg.children.size(); ++i) {
    if (reg.is_constant_under(arg.children[i], e.name)) continue;
    std::vector<ExprNode> factors = arg.children;
    ExprNode d = e;
    d.multiplier = Rational(1);
    d.rel = ParentRel::Argument;
    d.children[*slot] = arg.children[i];
    d.children[*slot].rel = ParentRel::Argument;
    d.children[*slot].bracket = arg.bracket == Bracket::None ? Bracket::Round : arg.bracket;
    factors[i] = std::move(d);
    terms.push_back(normalize(make_prod(std::move(factors))));
  }
  ExprNode out = terms.empty() ? make_zero() : normalize(make_sum(std::move(terms)));
  out.multiplier *= e.multiplier * arg.multiplier;
  out.rel = e.rel;
  out.bracket = e.bracket;
  return out;
}

// Moves the first matching derivative of a term onto its neighbours.
ExprNode by_parts(const ExprNode& term, const std::string& derivative, const PropertyRegistry& reg) {
  std::vector<ExprNode> factors;
  for (const ExprNode* f : term_factors(term)) factors.push_back(*f);
  std::size_t at = factors.size();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].name == derivative && argument_slot(factors[i])) {
      at = i;
      break;
    }
  }
  if (at == factors.size()) return term;
  const ExprNode d = factors[at];
  const ExprNode inner = d.children[*argument_slot(d)];
  std::vector<ExprNode> left(factors.begin(), factors.begin() + static_cast<std::ptrdiff_t>(at));
  std::vector<ExprNode> right(factors.begin() + static_cast<std::ptrdiff_t>(at) + 1, factors.end());
  std::vector<ExprNode> inner_factors;
  if (inner.is_prod()) {
    for (const auto& c : inner.children) inner_factors.push_back(c);
  } else {
    inner_factors.push_back(inner);
  }
  const Rational scale = -(term.is_prod() ? term.multiplier : Rational(1)) * inner.multiplier * d.multiplier;
  for (auto& f : inner_factors) f.multiplier = Rational(1);

  std::vector<ExprNode> out;
  auto emit = [&](std::vector<ExprNode> fs) {
    ExprNode t = normalize(make_prod(std::move(fs)));
    t.multiplier *= scale;
    out.push_back(std::move(t));
  };
  if (!left.empty() && !constant_under(left, derivative, reg)) {
    ExprNode dl = argument_holder(d, as_term(left));
    dl.multiplier = Rational(1);
    std::vector<ExprNode> fs{dl};
    fs.insert(fs.end(), inner_factors.begin(), inner_factors.end());
    fs.insert(fs.end(), right.begin(), right.end());
    emit(std::move(fs));
  }
  if (!right.empty() && !constant_under(right, derivative, reg)) {
    ExprNode dr = argument_holder(d, as_term(right));
    dr.multiplier = Rational(1);
    std::vector<ExprNode> fs = left;
    fs.insert(fs.end(), inner_factors.begin(), inner_factors.end());
    fs.push_back(dr);
    emit(std::move(fs));
  }
  ExprNode result = out.empty() ? make_zero() : normalize(make_sum(std::move(out)));
  result.rel = term.rel;
  return result;
}

ExprNode by_parts_all(const ExprNode& e, const std::string& derivative, const PropertyRegistry& reg) {
  if (e.is_sum()) {
    ExprNode out = e;
    for (auto& c : out.children) {
      const ParentRel rel = c.rel;
      c = by_parts(c, derivative, reg);
      c.rel = rel;
    }
    return normalize(std::move(out));
  }
  return by_parts(e, derivative, reg);
}

ExprNode pintegrate_node(ExprNode e, const std::string& derivative, const PropertyRegistry& reg, bool& found) {
  for (auto& c : e.children)
    if (!c.is_index_slot()) c = pintegrate_node(std::move(c), derivative, reg, found);
  if (!e.is_integral() || e.children.empty()) return e;
  found = true;
  ExprNode& integrand = e.children.back();
  const Bracket br = integrand.bracket;
  integrand = by_parts_all(normalize(integrand), derivative, reg);
  integrand.rel = ParentRel::Argument;
  integrand.bracket = integrand.is_sum() ? Bracket::Curly : br;
  if (integrand.is_zero()) {
    ExprNode z = make_zero();
    z.rel = e.rel;
    return z;
  }
  return e;
}

std::optional<ExprNode> vary_node(const ExprNode& f, const RuleSet& rules, std::set<std::string> in_use,
                                  const PropertyRegistry& reg);

std::optional<ExprNode> vary_product(const ExprNode& p, const RuleSet& rules, const std::set<std::string>& in_use,
                                     const PropertyRegistry& reg) {
  std::vector<ExprNode> terms;
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    auto v = vary_node(p.children[i], rules, in_use, reg);
    if (!v) continue;
    ExprNode t = p;
    const ParentRel rel = t.children[i].rel;
    t.children[i] = std::move(*v);
    t.children[i].rel = rel;
    t.rel = ParentRel::NoRelation;
    terms.push_back(normalize(std::move(t)));
  }
  if (terms.empty()) return std::nullopt;
  ExprNode out = normalize(make_sum(std::move(terms)));
  out.rel = p.rel;
  return out;
}

std::optional<ExprNode> vary_node(const ExprNode& f, const RuleSet& rules, std::set<std::string> in_use,
                                  const PropertyRegistry& reg) {
  if (f.is_number() || f.is_zero()) return std::nullopt;
  if (auto img = rewrite_with(rules, f, in_use, reg)) return img;
  if (f.is_prod()) return vary_product(f, rules, in_use, reg);
  if (f.is_sum()) {
    std::vector<ExprNode> terms;
    for (const auto& t : f.children)
      if (auto v = vary_node(t, rules, in_use, reg)) terms.push_back(std::move(*v));
    if (terms.empty()) return std::nullopt;
    ExprNode out = normalize(make_sum(std::move(terms)));
    out.multiplier *= f.multiplier;
    out.rel = f.rel;
    out.bracket = f.bracket;
    return out;
  }
  if (f.is_integral() || reg.is_inheriting(f) || reg.is_derivative(f)) {
    std::optional<std::size_t> slot;
    for (std::size_t i = 0; i < f.children.size(); ++i)
      if (f.children[i].rel == ParentRel::Argument) slot = i;  // integrand is the last argument
    if (!f.is_integral()) slot = argument_slot(f);
    if (!slot) return std::nullopt;
    auto v = vary_node(f.children[*slot], rules, in_use, reg);
    if (!v) return std::nullopt;
    ExprNode out = f;
    const Bracket br = out.children[*slot].bracket;
    out.children[*slot] = std::move(*v);
    out.children[*slot].rel = ParentRel::Argument;
    out.children[*slot].bracket = out.children[*slot].is_sum() && br == Bracket::None ? Bracket::Round : br;
    return out;
  }
  return std::nullopt;
}

ExprNode collect_node(ExprNode e) {
  for (auto& c : e.children)
    if (!c.is_index_slot()) c = collect_node(std::move(c));
  if (!e.is_sum()) return e;
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<ExprNode> kept;
  for (auto& t : e.children) {
    ExprNode plain = t;
    plain.multiplier = Rational(1);
    auto [it, fresh] = seen.emplace(structure_key(plain, false), kept.size());
    if (fresh) kept.push_back(std::move(t));
    else kept[it->second].multiplier += t.multiplier;
  }
  std::erase_if(kept, [](const ExprNode& t) { return t.multiplier.is_zero(); });
  const Rational m = e.multiplier;
  const ParentRel rel = e.rel;
  const Bracket br = e.bracket;
  ExprNode out = normalize(make_sum(std::move(kept)));
  if (!out.is_sum()) {
    out.multiplier *= m;
  } else {
    out.multiplier = m;
  }
  out.rel = rel;
  if (out.is_sum()) out.bracket = br;
  return out;
}

ExprNode prodsort_node(ExprNode e, const PropertyRegistry& reg) {
  for (auto& c : e.children)
    if (!c.is_index_slot()) c = prodsort_node(std::move(c), reg);
  if (!e.is_prod()) return e;
  std::vector<FactorSortKey> keys;
  for (const auto& c : e.children) keys.push_back(factor_sort_key(c, reg));
  int sign = 1;
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (std::size_t i = 0; i + 1 < e.children.size(); ++i) {
      if (!(keys[i + 1] < keys[i])) continue;
      const auto s = commutation_sign(reg, e.children[i], e.children[i + 1]);
      if (!s) continue;
      std::swap(e.children[i], e.children[i + 1]);
      std::swap(keys[i], keys[i + 1]);
      sign *= *s;
      swapped = true;
    }
  }
  e.multiplier *= Rational(sign);
  return e;
}

} // namespace

RuleSet RuleSet::from_expression(const Expression& e, const PropertyRegistry& reg) {
  RuleSet out;
  auto take = [&](const ExprNode& r) {
    if (!r.is_rule() || r.children.size() != 2) throw Error("expected a rule or a list of rules, got " + print_tex(r));
    Rule rule{r.children[0], r.children[1]};
    rule.lhs.rel = ParentRel::NoRelation;
    rule.rhs.rel = ParentRel::NoRelation;
    if (!rule.rhs.is_zero() && free_set(rule.lhs, reg) != free_set(rule.rhs, reg))
      throw Error("free indices differ between the two sides of " + print_tex(r));
    out.rules.push_back(std::move(rule));
  };
  if (e.is_list()) {
    for (const auto& c : e.children) take(c);
  } else {
    take(e);
  }
  return out;
}

CommandResult substitute(const Expression& e, const RuleSet& rules, const PropertyRegistry& reg) {
  CommandResult r{e, false, {}};
  each_top_term(r.expression, [&](ExprNode& term) {
    std::set<std::string> in_use = index_names(term, reg);
    substitute_in(term, rules, in_use, reg, r.applied);
  });
  r.expression = tidy(std::move(r.expression), reg);
  return r;
}

Expression distribute(const Expression& e) { return normalize(distribute_node(e)); }

Expression prodrule(const Expression& e, const PropertyRegistry& reg) { return tidy(prodrule_node(e, reg), reg); }

Expression pintegrate(const Expression& e, const std::string& derivative, const PropertyRegistry& reg) {
  bool found = false;
  Expression out = pintegrate_node(e, derivative, reg, found);
  if (!found) {
    out = e;
    each_top_term(out, [&](ExprNode& term) {
      const ParentRel rel = term.rel;
      term = by_parts(term, derivative, reg);
      term.rel = rel;
    });
  }
  return tidy(std::move(out), reg);
}

Expression vary(const Expression& e, const RuleSet& rules, const PropertyRegistry& reg) {
  Expression out = e;
  each_top_term(out, [&](ExprNode& term) {
    const ParentRel rel = term.rel;
    auto v = vary_node(term, rules, index_names(term, reg), reg);
    term = v ? std::move(*v) : make_zero();
    term.rel = rel;
  });
  return tidy(std::move(out), reg);
}

Expression collect_terms(const Expression& e) { return normalize(collect_node(e)); }

Expression prodsort(const Expression& e, const PropertyRegistry& reg) { return normalize(prodsort_node(e, reg)); }

Expression list_sum(const Expression& e, const PropertyRegistry& reg) {
  if (e.is_list()) {
    std::optional<std::set<std::string>> free;
    std::vector<ExprNode> terms;
    for (const auto& c : e.children) {
      auto f = free_set(c, reg);
      if (!c.is_zero() && free && *free != f) throw Error("list_sum: entries carry different free indices");
      if (!c.is_zero()) free = std::move(f);
      terms.push_back(c);
    }
    ExprNode out = normalize(make_sum(std::move(terms)));
    out.multiplier *= e.multiplier;
    return normalize(std::move(out));
  }
  if (!e.is_sum()) return e;
  const bool all_lists = std::all_of(e.children.begin(), e.children.end(), [](const ExprNode& c) { return c.is_list(); });
  const bool any_list = std::any_of(e.children.begin(), e.children.end(), [](const ExprNode& c) { return c.is_list(); });
  if (!any_list) return e;
  if (!all_lists) throw Error("list_sum: cannot add lists and non-lists");
  const std::size_t n = e.children.front().children.size();
  for (const auto& c : e.children)
    if (c.children.size() != n) throw Error("list_sum: lists of different lengths");
  std::vector<ExprNode> items;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ExprNode> terms;
    for (const auto& c : e.children) {
      ExprNode t = c.children[i];
      t.multiplier *= c.multiplier;
      terms.push_back(std::move(t));
    }
    items.push_back(collect_terms(normalize(make_sum(std::move(terms)))));
  }
  return normalize(make_list(std::move(items)));
}

} // namespace tensorpad

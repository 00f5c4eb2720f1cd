#include "tensorpad/symmetry.hpp"

#include "tensorpad/algorithms.hpp"
#include "tensorpad/indices.hpp"
#include "tensorpad/linalg.hpp"
#include "tensorpad/notation.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_map>

namespace tensorpad {

namespace {

Permutation identity_perm(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

int parity(const std::vector<int>& p) {
  int inversions = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

// All permutations of the given slot sets, each acting on its own cells.
std::vector<SignedPermutation> product_of_symmetric_groups(const std::vector<std::vector<int>>& blocks, int n) {
  std::vector<SignedPermutation> out{{identity_perm(n), 1}};
  for (const auto& block : blocks) {
    if (block.size() < 2) continue;
    std::vector<int> order(block.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<SignedPermutation> next;
    do {
      const int sign = parity(order);
      for (const auto& e : out) {
        SignedPermutation p = e;
        for (std::size_t i = 0; i < block.size(); ++i)
          p.perm[static_cast<std::size_t>(block[i])] = e.perm[static_cast<std::size_t>(block[static_cast<std::size_t>(order[i])])];
        p.sign *= sign;
        next.push_back(std::move(p));
      }
    } while (std::next_permutation(order.begin(), order.end()));
    out = std::move(next);
  }
  return out;
}

long hook_product(const YoungTableau& tab) {
  const auto shape = tab.shape();
  long prod = 1;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    for (int j = 0; j < shape[i]; ++j) {
      long leg = 0;
      for (std::size_t k = i + 1; k < shape.size(); ++k)
        if (shape[k] > j) ++leg;
      prod *= (shape[i] - j - 1) + leg + 1;
    }
  }
  return prod;
}

void permute_slots(ExprNode& factor, const Permutation& perm, const PropertyRegistry& reg) {
  auto slots = index_iterator(factor, reg);
  std::vector<ExprNode> before;
  before.reserve(slots.size());
  for (auto* s : slots) before.push_back(*s);
  for (std::size_t k = 0; k < slots.size() && k < perm.size(); ++k)
    *slots[k] = before[static_cast<std::size_t>(perm[k])];
}

// Accumulates terms by structure, keeping first-seen order.
class TermCollector {
public:
  void add(ExprNode term, const Rational& coefficient) {
    if (term.is_zero() || coefficient.is_zero()) return;
    Rational c = term.multiplier * coefficient;
    term.multiplier = Rational(1);
    std::string key = structure_key(term, false);
    auto [it, inserted] = index_.emplace(std::move(key), terms_.size());
    if (inserted) {
      terms_.push_back(std::move(term));
      coefficients_.push_back(c);
    } else {
      coefficients_[it->second] += c;
    }
  }

  Expression result() const {
    std::vector<ExprNode> out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (coefficients_[i].is_zero()) continue;
      ExprNode t = terms_[i];
      t.multiplier = coefficients_[i];
      out.push_back(std::move(t));
    }
    return normalize(make_sum(std::move(out)));
  }

private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<ExprNode> terms_;
  std::vector<Rational> coefficients_;
};

std::vector<std::pair<std::string, Rational>> coordinates(const Expression& projected) {
  std::vector<std::pair<std::string, Rational>> out;
  auto visit = [&](const ExprNode& t) {
    if (t.is_zero()) return;
    ExprNode plain = t;
    plain.multiplier = Rational(1);
    plain.rel = ParentRel::NoRelation;
    out.emplace_back(structure_key(plain, false), t.multiplier);
  };
  if (projected.is_sum()) {
    for (const auto& c : projected.children) visit(c);
  } else {
    visit(projected);
  }
  return out;
}

} // namespace

SlotPermutationSum young_projector(const YoungTableau& tab, int slot_count) {
  const auto rows = product_of_symmetric_groups(tab.rows, slot_count);
  const auto cols = product_of_symmetric_groups(tab.columns(), slot_count);
  std::map<Permutation, Rational> acc;
  for (const auto& c : cols) {
    for (const auto& r : rows) {
      // Symmetrize over rows first, then antisymmetrize over columns.
      Permutation p(static_cast<std::size_t>(slot_count));
      for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = c.perm[static_cast<std::size_t>(r.perm[k])];
      acc[p] += Rational(c.sign);
    }
  }
  const Rational norm(1L, hook_product(tab));
  SlotPermutationSum out;
  for (auto& [p, w] : acc)
    if (!w.is_zero()) out.terms.push_back({p, w * norm});
  return out;
}

SlotPermutationSum reduced_young_projector(const YoungTableau& tab, int slot_count) {
  static std::mutex mutex;
  static std::map<std::pair<std::vector<std::vector<int>>, int>, SlotPermutationSum> cache;
  const auto key = std::make_pair(tab.rows, slot_count);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const auto group = mono_term_group(tab, slot_count);
  const auto full = young_projector(tab, slot_count);
  std::map<Permutation, Rational> acc;
  std::vector<Permutation> order;
  for (const auto& t : full.terms) {
    std::optional<Permutation> best;
    int sign = 0;
    bool zero = false;
    for (const auto& g : group) {
      Permutation q(t.perm.size());
      for (std::size_t k = 0; k < q.size(); ++k) q[k] = t.perm[static_cast<std::size_t>(g.perm[k])];
      if (!best || q < *best) {
        best = q;
        sign = g.sign;
      } else if (q == *best && g.sign != sign) {
        zero = true;
      }
    }
    if (zero) continue;
    auto [it, inserted] = acc.emplace(*best, Rational(0));
    if (inserted) order.push_back(*best);
    it->second += t.weight * Rational(sign);
  }
  SlotPermutationSum out;
  for (const auto& p : order)
    if (!acc[p].is_zero()) out.terms.push_back({p, acc[p]});
  std::lock_guard lock(mutex);
  cache.emplace(key, out);
  return out;
}

Expression young_project(const Expression& e, const PropertyRegistry& reg) {
  Expression out = e;
  for_each_term(out, [&](ExprNode& term) {
    if (term.is_number() || term.is_rule()) return;
    std::vector<std::vector<std::pair<ExprNode, Rational>>> images;
    for (const ExprNode* f : term_factors(term)) {
      ExprNode plain = *f;
      plain.multiplier = Rational(1);
      const auto slots = index_iterator(plain, reg);
      if (slots.empty()) {
        images.push_back({{plain, Rational(1)}});
        continue;
      }
      const auto tab = tableau_of(reg, plain, slots.size());
      if (!tab) throw Error("young_project: " + print_tex(plain) + " carries indices but no tableau symmetry");
      std::vector<std::pair<ExprNode, Rational>> img;
      for (const auto& t : reduced_young_projector(*tab, static_cast<int>(slots.size())).terms) {
        ExprNode copy = plain;
        permute_slots(copy, t.perm, reg);
        img.emplace_back(std::move(copy), t.weight);
      }
      images.push_back(std::move(img));
    }
    TermCollector collector;
    std::vector<std::size_t> pick(images.size(), 0);
    for (;;) {
      std::vector<ExprNode> factors;
      Rational w = term.multiplier;
      for (std::size_t i = 0; i < images.size(); ++i) {
        factors.push_back(images[i][pick[i]].first);
        w *= images[i][pick[i]].second;
      }
      ExprNode t = factors.size() == 1 ? std::move(factors.front()) : make_prod(std::move(factors));
      t.multiplier = w;
      t.rel = ParentRel::NoRelation;
      canonicalise_term(t, reg);
      collector.add(std::move(t), Rational(1));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == images[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    const ParentRel rel = term.rel;
    term = collector.result();
    term.rel = rel;
  });
  return collect_terms(out);
}

Expression asym(const Expression& e, const std::vector<SlotSpec>& specs, const PropertyRegistry& reg) {
  const std::size_t k = specs.size();
  Expression out = e;
  if (k < 2) return out;
  long factorial = 1;
  for (std::size_t i = 2; i <= k; ++i) factorial *= static_cast<long>(i);
  for (const auto& s : specs) {
    const IndexSet* set = reg.index_set_of(s.name);
    if (set != nullptr && set->dimension && static_cast<std::size_t>(*set->dimension) < k) return make_zero();
  }
  for_each_term(out, [&](ExprNode& term) {
    // Locate the slots once, as paths into the term, so copies can be edited.
    auto slots = index_iterator(term, reg);
    std::vector<std::size_t> where;
    for (const auto& s : specs) {
      std::size_t found = slots.size();
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]->name != s.name || (s.rel && slots[i]->rel != *s.rel)) continue;
        if (std::find(where.begin(), where.end(), i) != where.end()) continue;
        found = i;
        break;
      }
      if (found == slots.size()) throw Error("asym: index " + s.name + " not found in " + print_tex(term));
      where.push_back(found);
    }
    std::vector<std::string> names;
    for (auto i : where) names.push_back(slots[i]->name);

    std::vector<ExprNode> terms;
    terms.reserve(static_cast<std::size_t>(factorial));
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    const Rational weight(1L, factorial);
    do {
      ExprNode copy = term;
      auto cs = index_iterator(copy, reg);
      for (std::size_t i = 0; i < k; ++i) cs[where[i]]->name = names[static_cast<std::size_t>(order[i])];
      copy.multiplier = term.multiplier * weight * Rational(parity(order));
      copy.rel = ParentRel::Argument;
      terms.push_back(std::move(copy));
    } while (std::next_permutation(order.begin(), order.end()));
    const ParentRel rel = term.rel;
    term = make_sum(std::move(terms));
    term.rel = rel;
  });
  return out;
}

namespace {

void enumerate_matchings(std::vector<int>& partner, const std::vector<const IndexSet*>& sets,
                         const std::function<void()>& visit) {
  std::size_t first = 0;
  while (first < partner.size() && partner[first] >= 0) ++first;
  if (first == partner.size()) {
    visit();
    return;
  }
  for (std::size_t j = first + 1; j < partner.size(); ++j) {
    if (partner[j] >= 0 || sets[j] != sets[first]) continue;
    partner[first] = static_cast<int>(j);
    partner[j] = static_cast<int>(first);
    enumerate_matchings(partner, sets, visit);
    partner[first] = -1;
    partner[j] = -1;
  }
}

std::vector<std::vector<std::pair<std::string, Rational>>> project_all(const std::vector<Expression>& items,
                                                                      const PropertyRegistry& reg) {
  std::vector<std::vector<std::pair<std::string, Rational>>> out;
  out.reserve(items.size());
  for (const auto& m : items) out.push_back(coordinates(young_project(m, reg)));
  return out;
}

// Assembles rows over a shared column set.
RationalMatrix to_rows(const std::vector<std::vector<std::pair<std::string, Rational>>>& coords,
                       std::vector<std::string>& columns) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < columns.size(); ++i) index.emplace(columns[i], i);
  for (const auto& row : coords)
    for (const auto& [k, v] : row)
      if (index.emplace(k, columns.size()).second) columns.push_back(k);
  RationalMatrix rows(coords.size(), std::vector<Rational>(columns.size()));
  for (std::size_t r = 0; r < coords.size(); ++r)
    for (const auto& [k, v] : coords[r]) rows[r][index.at(k)] += v;
  return rows;
}

} // namespace

std::vector<Expression> all_contractions(const Expression& monomial, const PropertyRegistry& reg) {
  Expression base = normalize(monomial);
  base.multiplier = Rational(1);
  const auto slots = index_iterator(base, reg);
  if (slots.size() % 2 != 0)
    throw Error("all_contractions: odd number of indices (" + std::to_string(slots.size()) + ")");
  std::vector<const IndexSet*> sets;
  for (const auto* s : slots) sets.push_back(reg.index_set_of(s->name));

  std::vector<Expression> candidates;
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<int> partner(slots.size(), -1);
  enumerate_matchings(partner, sets, [&]() {
    ExprNode copy = base;
    auto cs = index_iterator(copy, reg);
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (static_cast<std::size_t>(partner[i]) < i) cs[i]->name = cs[static_cast<std::size_t>(partner[i])]->name;
    canonicalise_term(copy, reg);
    if (copy.is_zero()) return;
    copy.multiplier = Rational(1);
    if (seen.emplace(structure_key(copy, false), candidates.size()).second) candidates.push_back(std::move(copy));
  });

  // Keep the candidates that enlarge the span of the projected images.
  const auto coords = project_all(candidates, reg);
  std::vector<std::string> columns;
  const RationalMatrix rows = to_rows(coords, columns);
  std::vector<Expression> kept;
  RationalMatrix kept_rows;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool nonzero = std::any_of(rows[i].begin(), rows[i].end(), [](const Rational& r) { return !r.is_zero(); });
    if (!nonzero) continue;
    kept_rows.push_back(rows[i]);
    if (matrix_rank(kept_rows) < kept_rows.size()) {
      kept_rows.pop_back();
      continue;
    }
    kept.push_back(candidates[i]);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Expression& a, const Expression& b) {
    return structure_key(a, false) < structure_key(b, false);
  });
  return kept;
}

MonomialBasis build_basis(const std::vector<Expression>& monomials, const PropertyRegistry& reg) {
  MonomialBasis basis;
  basis.elements = monomials;
  const auto coords = project_all(monomials, reg);
  basis.projected_matrix = to_rows(coords, basis.columns);
  basis.rank = matrix_rank(basis.projected_matrix);
  if (basis.rank < monomials.size()) {
    auto cert = row_dependency(basis.projected_matrix);
    std::string text;
    for (const auto& c : *cert) text += (text.empty() ? "" : ", ") + c.to_string();
    throw BasisDependent("basis elements are linearly dependent; certificate (" + text + ")", *cert);
  }
  return basis;
}

CoefficientVector decompose(const Expression& e, const MonomialBasis& basis, const PropertyRegistry& reg) {
  const auto coords = coordinates(young_project(e, reg));
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < basis.columns.size(); ++i) index.emplace(basis.columns[i], i);
  std::vector<Rational> b(basis.columns.size());
  for (const auto& [k, v] : coords) {
    const auto it = index.find(k);
    if (it == index.end()) throw Error("not in span");
    b[it->second] += v;
  }
  // Columns of the transposed matrix are basis elements.
  RationalMatrix a(basis.columns.size(), std::vector<Rational>(basis.elements.size()));
  for (std::size_t r = 0; r < basis.elements.size(); ++r)
    for (std::size_t c = 0; c < basis.columns.size(); ++c) a[c][r] = basis.projected_matrix[r][c];
  auto x = solve_linear(a, b);
  if (!x) throw Error("not in span");
  return *x;
}

Expression reduce_sum(const Expression& e, const PropertyRegistry& reg) {
  Expression in = normalize(e);
  std::vector<ExprNode> terms;
  if (in.is_sum()) terms = in.children;
  else terms.push_back(in);

  std::vector<ExprNode> kept;
  std::vector<Rational> coefficient;
  std::vector<std::vector<std::pair<std::string, Rational>>> kept_coords;
  for (auto& t : terms) {
    ExprNode unit = t;
    const Rational c = unit.multiplier;
    unit.multiplier = Rational(1);
    auto coords = coordinates(young_project(unit, reg));
    if (!kept.empty()) {
      std::vector<std::string> columns;
      auto all = kept_coords;
      all.push_back(coords);
      const RationalMatrix rows = to_rows(all, columns);
      RationalMatrix a(columns.size(), std::vector<Rational>(kept.size()));
      for (std::size_t r = 0; r < kept.size(); ++r)
        for (std::size_t col = 0; col < columns.size(); ++col) a[col][r] = rows[r][col];
      if (auto x = solve_linear(a, rows.back())) {
        for (std::size_t r = 0; r < kept.size(); ++r) coefficient[r] += c * (*x)[r];
        continue;
      }
    }
    kept.push_back(unit);
    coefficient.push_back(c);
    kept_coords.push_back(std::move(coords));
  }
  std::vector<ExprNode> out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (coefficient[i].is_zero()) continue;
    kept[i].multiplier = coefficient[i];
    out.push_back(std::move(kept[i]));
  }
  return normalize(make_sum(std::move(out)));
}

} // namespace tensorpad

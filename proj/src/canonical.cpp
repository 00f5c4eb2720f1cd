#include "tensorpad/indices.hpp"
#include "tensorpad/notation.hpp"
#include "tensorpad/symmetry.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <unordered_map>

namespace tensorpad {

namespace {

Permutation compose(const Permutation& first, const Permutation& then) {
  // Applying `first` and then `then`: slot k ends up with old slot first[then[k]].
  Permutation out(then.size());
  for (std::size_t k = 0; k < then.size(); ++k) out[k] = first[static_cast<std::size_t>(then[k])];
  return out;
}

Permutation identity(int n) {
  Permutation p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  return p;
}

std::vector<SignedPermutation> generate_group(const std::vector<SignedPermutation>& generators, int n) {
  std::vector<SignedPermutation> elements{{identity(n), 1}};
  std::map<Permutation, int> seen{{elements.front().perm, 1}};
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (const auto& g : generators) {
      Permutation p = compose(elements[i].perm, g.perm);
      const int sign = elements[i].sign * g.sign;
      auto [it, inserted] = seen.emplace(p, sign);
      if (inserted) elements.push_back({std::move(p), sign});
    }
  }
  return elements;
}

bool contains_sum(const ExprNode& n) {
  if (n.is_sum()) return true;
  for (const auto& c : n.children) {
    if (c.rel != ParentRel::Argument) continue;
    if (c.is_sum() || contains_sum(c)) return true;
  }
  return false;
}

} // namespace

std::vector<SignedPermutation> mono_term_group(const YoungTableau& tab, int slot_count) {
  static std::mutex mutex;
  static std::map<std::pair<std::vector<std::vector<int>>, int>, std::vector<SignedPermutation>> cache;
  const auto key = std::make_pair(tab.rows, slot_count);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::vector<SignedPermutation> gens;
  const auto cols = tab.columns();
  for (const auto& col : cols) {
    for (std::size_t i = 0; i + 1 < col.size(); ++i) {
      Permutation p = identity(slot_count);
      std::swap(p[static_cast<std::size_t>(col[i])], p[static_cast<std::size_t>(col[i + 1])]);
      gens.push_back({p, -1});
    }
  }
  for (std::size_t a = 0; a + 1 < cols.size(); ++a) {
    if (cols[a].size() != cols[a + 1].size()) continue;
    Permutation p = identity(slot_count);
    for (std::size_t i = 0; i < cols[a].size(); ++i)
      std::swap(p[static_cast<std::size_t>(cols[a][i])], p[static_cast<std::size_t>(cols[a + 1][i])]);
    gens.push_back({p, 1});
  }
  auto group = generate_group(gens, slot_count);
  std::lock_guard lock(mutex);
  cache.emplace(key, group);
  return group;
}

std::vector<SignedPermutation> factor_symmetry(const ExprNode& factor, const PropertyRegistry& reg) {
  const auto slots = index_iterator(factor, reg);
  if (slots.empty() || contains_sum(factor)) return {};
  const auto tab = tableau_of(reg, factor, slots.size());
  if (!tab) return {};
  return mono_term_group(*tab, static_cast<int>(slots.size()));
}

FactorSortKey factor_sort_key(const ExprNode& factor, const PropertyRegistry& reg) {
  FactorSortKey key;
  key.name = factor.name;
  key.group = factor.name;
  key.index_count = index_iterator(factor, reg).size();
  for (const auto& e : reg.entries()) {
    if (e.record.kind != PropertyKind::SortOrder || !e.pattern.matches(factor)) continue;
    key.group = e.record.list_members.front().stem();
    for (std::size_t i = 0; i < e.record.list_members.size(); ++i)
      if (e.record.list_members[i].matches(factor)) {
        key.position = i;
        break;
      }
    break;
  }
  return key;
}

namespace {

constexpr int kNoName = -1;

struct SlotInfo {
  bool dummy = false;
  int id = 0;  // name rank for fixed names, dummy id otherwise
  int rel = 0;
};

struct FactorInfo {
  const ExprNode* node = nullptr;
  bool permutable = false;
  std::vector<SlotInfo> slots;
  std::vector<SignedPermutation> group;
  int key_rank = 0;
  int identity_rank = 0;  // equal for structurally identical factors
};

struct SearchState {
  std::vector<int> remaining;
  std::vector<std::pair<int, int>> placed;  // factor, group element
  std::vector<int> assigned;                // dummy -> name rank, kNoName when open
  std::vector<int> counters;                // per set, names handed out
  int sign = 1;
};

int rel_code(ParentRel r) { return r == ParentRel::Superscript ? 1 : 0; }

class Canonicaliser {
public:
  Canonicaliser(Expression& term, const PropertyRegistry& reg) : term_(term), reg_(reg) {}

  void run() {
    if (term_.is_number() || term_.is_rule() || term_.is_list()) return;
    classify_indices(term_, reg_);  // rejects triple occurrences
    auto factors = term_factors(term_);
    if (factors.size() == 1 && exposed_indices(*factors.front(), reg_).empty()) return;
    build(factors);
    search();
  }

private:
  void build(const std::vector<ExprNode*>& factors) {
    std::map<std::string, int> name_count;
    std::vector<std::vector<IndexOccurrence>> occ(factors.size());
    for (std::size_t f = 0; f < factors.size(); ++f) {
      occ[f] = exposed_indices(*factors[f], reg_);
      for (const auto& o : occ[f]) ++name_count[o.name];
    }
    std::set<std::string> exposed_names;
    for (const auto& [n, c] : name_count) exposed_names.insert(n);

    std::set<std::string> fixed;  // names that keep their spelling
    std::vector<std::string> dummy_order;
    for (const auto& list : occ) {
      for (const auto& o : list) {
        const bool is_dummy = name_count[o.name] == 2 && reg_.index_set_of(o.name) != nullptr;
        if (!is_dummy) {
          fixed.insert(o.name);
        } else if (std::find(dummy_order.begin(), dummy_order.end(), o.name) == dummy_order.end()) {
          dummy_order.push_back(o.name);
        }
      }
    }
    std::set<std::string> used = fixed;
    for (const auto& n : index_names(term_, reg_))
      if (!exposed_names.contains(n)) used.insert(n);

    // Pool of replacement names per index set, in hand-out order.
    std::map<const IndexSet*, int> set_ids;
    std::vector<const IndexSet*> sets;
    std::vector<int> dummy_set;
    for (const auto& d : dummy_order) {
      const IndexSet* s = reg_.index_set_of(d);
      auto [it, inserted] = set_ids.emplace(s, static_cast<int>(sets.size()));
      if (inserted) sets.push_back(s);
      dummy_set.push_back(it->second);
    }
    std::vector<std::vector<std::string>> pool_names(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const auto need = std::count(dummy_set.begin(), dummy_set.end(), static_cast<int>(s));
      for (long k = 0; k < need; ++k) {
        std::string fresh = fresh_dummy(*sets[s], used);
        used.insert(fresh);
        pool_names[s].push_back(std::move(fresh));
      }
    }

    // Rank every name that can appear.
    std::vector<std::pair<IndexOrdinal, std::string>> all;
    for (const auto& n : fixed) all.emplace_back(index_ordinal(n, reg_), n);
    for (const auto& p : pool_names)
      for (const auto& n : p) all.emplace_back(index_ordinal(n, reg_), n);
    std::sort(all.begin(), all.end());
    std::map<std::string, int> rank;
    for (std::size_t i = 0; i < all.size(); ++i) rank.emplace(all[i].second, static_cast<int>(i));
    rank_names_.resize(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) rank_names_[i] = all[i].second;

    pool_ranks_.resize(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s)
      for (const auto& n : pool_names[s]) pool_ranks_[s].push_back(rank.at(n));
    dummy_set_ = dummy_set;
    dummy_names_ = dummy_order;

    // Factor descriptions.
    std::vector<std::pair<std::pair<FactorSortKey, std::string>, int>> keys;
    std::map<std::string, int> identity_ids;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      FactorInfo info;
      info.node = factors[f];
      info.permutable = !contains_sum(*factors[f]);
      for (const auto& o : occ[f]) {
        SlotInfo s;
        s.rel = rel_code(o.rel);
        const auto d = std::find(dummy_order.begin(), dummy_order.end(), o.name);
        if (d != dummy_order.end()) {
          s.dummy = true;
          s.id = static_cast<int>(d - dummy_order.begin());
        } else {
          s.id = rank.at(o.name);
        }
        info.slots.push_back(s);
      }
      if (info.permutable) info.group = factor_symmetry(*factors[f], reg_);
      if (info.group.empty()) info.group.push_back({identity(static_cast<int>(info.slots.size())), 1});
      keys.push_back({{factor_sort_key(*factors[f], reg_), shape_key(*factors[f], info.permutable, occ[f])},
                      static_cast<int>(f)});
      ExprNode plain = *factors[f];
      plain.multiplier = Rational(1);
      plain.rel = ParentRel::Argument;
      const auto [it, inserted] =
          identity_ids.emplace(structure_key(plain, true), static_cast<int>(identity_ids.size()));
      info.identity_rank = it->second;
      factors_.push_back(std::move(info));
    }
    std::sort(keys.begin(), keys.end());
    int r = -1;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i == 0 || keys[i].first != keys[i - 1].first) ++r;
      factors_[static_cast<std::size_t>(keys[i].second)].key_rank = r;
    }

    const std::size_t n = factors_.size();
    commute_.assign(n, std::vector<std::optional<int>>(n, 1));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        commute_[a][b] = commutation_sign(reg_, *factors_[a].node, *factors_[b].node);
        commute_[b][a] = commute_[a][b];
      }
  }

  std::string shape_key(const ExprNode& f, bool permutable, const std::vector<IndexOccurrence>& occ) const {
    ExprNode copy = f;
    copy.multiplier = Rational(1);
    copy.rel = ParentRel::Argument;
    if (permutable) {
      for (auto* s : index_iterator(copy, reg_)) {
        s->name = "~";
        s->rel = ParentRel::Subscript;
      }
    } else {
      std::map<std::string, std::string> blank;
      for (const auto& o : occ) blank.emplace(o.name, "~");
      rename_indices(copy, blank, reg_);
    }
    return structure_key(copy, true);
  }

  // Tokens of factor f arranged by group element g, extending the state's
  // name assignment. Returns false as soon as the block exceeds `bound`.
  bool block(const SearchState& st, int f, int g, std::vector<int>& out, std::vector<int>& assigned,
             std::vector<int>& counters, const std::vector<int>* bound) const {
    const FactorInfo& info = factors_[static_cast<std::size_t>(f)];
    const auto& perm = info.group[static_cast<std::size_t>(g)].perm;
    out.clear();
    assigned = st.assigned;
    counters = st.counters;
    bool tight = bound != nullptr;
    auto push = [&](int token) {
      const std::size_t k = out.size();
      out.push_back(token);
      if (tight) {
        const int b = (*bound)[k];
        if (token > b) return false;
        if (token < b) tight = false;
      }
      return true;
    };
    if (!push(info.key_rank)) return false;
    for (std::size_t k = 0; k < perm.size(); ++k) {
      const SlotInfo& s = info.slots[static_cast<std::size_t>(perm[k])];
      int name = s.id;
      if (s.dummy) {
        int& a = assigned[static_cast<std::size_t>(s.id)];
        if (a == kNoName) {
          const int set = dummy_set_[static_cast<std::size_t>(s.id)];
          a = pool_ranks_[static_cast<std::size_t>(set)][static_cast<std::size_t>(counters[static_cast<std::size_t>(set)]++)];
        }
        name = a;
      }
      if (!push(name * 2 + s.rel)) return false;
    }
    return true;
  }

  void search() {
    SearchState start;
    for (std::size_t f = 0; f < factors_.size(); ++f) start.remaining.push_back(static_cast<int>(f));
    start.assigned.assign(dummy_names_.size(), kNoName);
    start.counters.assign(pool_ranks_.size(), 0);
    std::vector<SearchState> states{start};

    std::vector<int> tokens;
    std::vector<int> assigned;
    std::vector<int> counters;
    for (std::size_t level = 0; level < factors_.size(); ++level) {
      std::vector<int> best;
      std::vector<SearchState> next;
      for (const auto& st : states) {
        for (std::size_t j = 0; j < st.remaining.size(); ++j) {
          const int f = st.remaining[j];
          // Sign of moving f to the front past the factors before it.
          int move_sign = 1;
          bool ok = true;
          for (std::size_t i = 0; i < j && ok; ++i) {
            const auto c = commute_[static_cast<std::size_t>(st.remaining[i])][static_cast<std::size_t>(f)];
            if (c) move_sign *= *c;
            else ok = false;
          }
          if (!ok) continue;
          const auto& group = factors_[static_cast<std::size_t>(f)].group;
          for (std::size_t g = 0; g < group.size(); ++g) {
            if (!block(st, f, static_cast<int>(g), tokens, assigned, counters, best.empty() ? nullptr : &best))
              continue;
            if (!best.empty() && tokens == best) {
              // tie, fall through
            } else if (best.empty() || tokens < best) {
              best = tokens;
              next.clear();
            }
            SearchState ns;
            ns.remaining = st.remaining;
            ns.remaining.erase(ns.remaining.begin() + static_cast<long>(j));
            ns.placed = st.placed;
            ns.placed.emplace_back(f, static_cast<int>(g));
            ns.assigned = assigned;
            ns.counters = counters;
            ns.sign = st.sign * move_sign * group[g].sign;
            next.push_back(std::move(ns));
          }
        }
      }
      if (next.empty()) throw Error("canonicalise: no admissible factor ordering");
      // Merge states that can only complete identically.
      std::map<std::pair<std::vector<int>, std::vector<int>>, std::size_t> seen;
      std::vector<SearchState> merged;
      for (auto& ns : next) {
        std::vector<int> rem;
        for (int f : ns.remaining) rem.push_back(factors_[static_cast<std::size_t>(f)].identity_rank);
        auto [it, inserted] = seen.emplace(std::make_pair(rem, ns.assigned), merged.size());
        if (inserted) {
          merged.push_back(std::move(ns));
        } else if (merged[it->second].sign != ns.sign) {
          zero_ = true;
          break;
        }
      }
      if (zero_) break;
      states = std::move(merged);
    }

    if (zero_) {
      term_ = make_zero();
      return;
    }
    for (const auto& st : states)
      if (st.sign != states.front().sign) {
        term_ = make_zero();
        return;
      }
    assemble(states.front());
  }

  void assemble(const SearchState& st) {
    std::vector<ExprNode> out;
    for (const auto& [f, g] : st.placed) {
      const FactorInfo& info = factors_[static_cast<std::size_t>(f)];
      ExprNode copy = *info.node;
      copy.multiplier = Rational(1);
      const auto& perm = info.group[static_cast<std::size_t>(g)].perm;
      if (info.permutable && !perm.empty()) {
        auto slots = index_iterator(copy, reg_);
        std::vector<ExprNode> before;
        before.reserve(slots.size());
        for (auto* s : slots) before.push_back(*s);
        for (std::size_t k = 0; k < slots.size() && k < perm.size(); ++k)
          *slots[k] = before[static_cast<std::size_t>(perm[k])];
      }
      out.push_back(std::move(copy));
    }
    std::map<std::string, std::string> renaming;
    for (std::size_t d = 0; d < dummy_names_.size(); ++d) {
      const int r = st.assigned[d];
      if (r != kNoName && rank_names_[static_cast<std::size_t>(r)] != dummy_names_[d])
        renaming.emplace(dummy_names_[d], rank_names_[static_cast<std::size_t>(r)]);
    }
    const Rational mult = term_.multiplier * Rational(st.sign);
    const ParentRel rel = term_.rel;
    ExprNode result = out.size() == 1 ? std::move(out.front()) : make_prod(std::move(out));
    rename_indices(result, renaming, reg_);
    result.multiplier = mult;
    result.rel = rel;
    term_ = std::move(result);
  }

  Expression& term_;
  const PropertyRegistry& reg_;
  std::vector<FactorInfo> factors_;
  std::vector<std::vector<std::optional<int>>> commute_;
  std::vector<std::string> rank_names_;
  std::vector<std::vector<int>> pool_ranks_;
  std::vector<int> dummy_set_;
  std::vector<std::string> dummy_names_;
  bool zero_ = false;
};

} // namespace

namespace {

// A traceless tensor contracted with itself vanishes.
bool vanishing_trace(const ExprNode& factor, const PropertyRegistry& reg) {
  const PropertyRecord* rec = reg.query(factor, PropertyKind::WeylTensor);
  if (rec == nullptr || !rec->traceless) return false;
  std::set<std::string> seen;
  for (const auto& c : factor.children)
    if (c.is_index_slot() && is_index(c, reg) && !seen.insert(c.name).second) return true;
  return false;
}

} // namespace

void canonicalise_term(Expression& term, const PropertyRegistry& reg) {
  for (const ExprNode* f : term_factors(term)) {
    if (vanishing_trace(*f, reg)) {
      const ParentRel rel = term.rel;
      term = make_zero();
      term.rel = rel;
      return;
    }
  }
  Canonicaliser(term, reg).run();
}

Expression canonicalise(const Expression& e, const PropertyRegistry& reg) {
  Expression out = e;
  for_each_term(out, [&](ExprNode& t) { canonicalise_term(t, reg); });
  return out;
}

Expression indexsort(const Expression& e, const PropertyRegistry& reg) {
  Expression out = e;
  for_each_term(out, [&](ExprNode& term) {
    for (ExprNode* f : term_factors(term)) {
      const auto group = factor_symmetry(*f, reg);
      if (group.size() < 2) continue;
      auto slots = index_iterator(*f, reg);
      std::vector<IndexOrdinal> ord;
      for (const auto* s : slots) ord.push_back(index_ordinal(s->name, reg));
      std::optional<std::size_t> best;
      bool zero = false;
      auto image = [&](std::size_t g) {
        std::vector<std::pair<IndexOrdinal, int>> v;
        for (int k : group[g].perm)
          v.emplace_back(ord[static_cast<std::size_t>(k)], rel_code(slots[static_cast<std::size_t>(k)]->rel));
        return v;
      };
      auto best_image = image(0);
      best = 0;
      for (std::size_t g = 1; g < group.size(); ++g) {
        auto v = image(g);
        if (v < best_image) {
          best_image = std::move(v);
          best = g;
        } else if (v == best_image && group[g].sign != group[*best].sign) {
          zero = true;
        }
      }
      if (zero) {
        term.multiplier = Rational(0);
        break;
      }
      std::vector<ExprNode> before;
      for (auto* s : slots) before.push_back(*s);
      const auto& perm = group[*best].perm;
      for (std::size_t k = 0; k < slots.size(); ++k) *slots[k] = before[static_cast<std::size_t>(perm[k])];
      term.multiplier *= Rational(group[*best].sign);
    }
  });
  return out;
}

} // namespace tensorpad

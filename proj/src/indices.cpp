#include "tensorpad/indices.hpp"

#include "tensorpad/notation.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace tensorpad {

namespace {

bool passes_indices(const ExprNode& n, const PropertyRegistry& reg) {
  return n.is_prod() || n.is_integral() || reg.is_inheriting(n) || reg.is_derivative(n) ||
         reg.has_direct(n, PropertyKind::IndexInherit);
}

void exposed(const ExprNode& n, const PropertyRegistry& reg, std::vector<IndexOccurrence>& out);

IndexClassification classify_from(const std::vector<IndexOccurrence>& occ) {
  IndexClassification result;
  std::map<std::string, std::vector<std::size_t>> seen;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    auto& v = seen[occ[i].name];
    if (v.empty()) order.push_back(occ[i].name);
    v.push_back(i);
  }
  for (const auto& name : order) {
    const auto& v = seen[name];
    if (v.size() == 1) {
      result.free.push_back(occ[v[0]]);
    } else if (v.size() == 2) {
      result.dummy.emplace_back(occ[v[0]], occ[v[1]]);
    } else {
      std::string where;
      for (auto i : v) where += (where.empty() ? "" : ", ") + std::to_string(occ[i].position);
      throw Error("index " + name + " occurs " + std::to_string(v.size()) + " times (slots " + where + ")");
    }
  }
  return result;
}

void exposed(const ExprNode& n, const PropertyRegistry& reg, std::vector<IndexOccurrence>& out) {
  if (n.is_sum()) {
    if (n.children.empty()) return;
    std::vector<IndexOccurrence> inner;
    exposed(n.children.front(), reg, inner);
    for (auto& occ : classify_from(inner).free) out.push_back(std::move(occ));
    return;
  }
  if (passes_indices(n, reg)) {
    for (const auto& c : n.children)
      if (c.rel == ParentRel::Argument) exposed(c, reg, out);
  }
  for (const auto& c : n.children)
    if (is_index(c, reg)) out.push_back(IndexOccurrence{c.name, c.rel, 0});
}

// Every index slot in a deterministic order: like index_iterator, but also
// entering sums and the arguments of non-inheriting nodes.
template <typename Node, typename Out>
void all_slots(Node& n, const PropertyRegistry& reg, Out& out) {
  const bool through = n.is_sum() || n.is_list() || n.is_rule() || passes_indices(n, reg);
  if (through) {
    for (auto& c : n.children)
      if (c.rel == ParentRel::Argument) all_slots(c, reg, out);
  }
  for (auto& c : n.children) {
    if (is_index(c, reg)) {
      out.push_back(&c);
      for (auto& g : c.children) all_slots(g, reg, out);
    }
  }
  if (!through) {
    for (auto& c : n.children)
      if (c.rel == ParentRel::Argument) all_slots(c, reg, out);
  }
}

std::set<std::string> free_names_of(const ExprNode& e, const PropertyRegistry& reg) {
  std::set<std::string> out;
  if (e.is_list()) {
    for (const auto& c : e.children) {
      auto f = free_names_of(c, reg);
      out.insert(f.begin(), f.end());
    }
    return out;
  }
  if (e.is_rule()) return free_names_of(e.children.at(0), reg);
  for (const auto& n : classify_indices(e.is_sum() ? e.children.front() : e, reg).free_names()) out.insert(n);
  return out;
}

} // namespace

std::vector<std::string> IndexClassification::free_names() const {
  std::vector<std::string> out;
  for (const auto& f : free) out.push_back(f.name);
  return out;
}

std::vector<std::string> IndexClassification::dummy_names() const {
  std::vector<std::string> out;
  for (const auto& d : dummy) out.push_back(d.first.name);
  return out;
}

IndexClassification classify_indices(const Expression& term, const PropertyRegistry& reg) {
  std::vector<IndexOccurrence> occ;
  // Every term of a sum shares its free indices; the first one stands in.
  exposed(term.is_sum() ? term.children.front() : term, reg, occ);
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i].position = i;
  return classify_from(occ);
}

std::vector<IndexOccurrence> exposed_indices(const Expression& e, const PropertyRegistry& reg) {
  std::vector<IndexOccurrence> occ;
  exposed(e, reg, occ);
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i].position = i;
  return occ;
}

std::set<std::string> index_names(const Expression& e, const PropertyRegistry& reg) {
  std::vector<const ExprNode*> slots;
  all_slots(e, reg, slots);
  std::set<std::string> out;
  for (const auto* s : slots) out.insert(s->name);
  return out;
}

std::string fresh_dummy(const IndexSet& set, const std::set<std::string>& in_use) {
  for (const auto& m : set.members)
    if (!in_use.contains(m)) return m;
  if (set.generator.empty())
    throw Error("index set '" + set.name + "' has no unused names left and no generator");
  for (std::size_t k = 1;; ++k) {
    std::string candidate = set.generator + std::to_string(k);
    if (!in_use.contains(candidate)) return candidate;
  }
}

void rename_indices(Expression& e, const std::map<std::string, std::string>& renaming,
                    const PropertyRegistry& reg) {
  if (renaming.empty()) return;
  std::vector<ExprNode*> slots;
  all_slots(e, reg, slots);
  for (auto* s : slots) {
    const auto it = renaming.find(s->name);
    if (it != renaming.end()) s->name = it->second;
  }
}

Expression relabel_on_insert(Expression inserted, std::set<std::string>& in_use, const PropertyRegistry& reg) {
  std::vector<const ExprNode*> slots;
  all_slots(inserted, reg, slots);
  const std::set<std::string> free = free_names_of(inserted, reg);
  std::set<std::string> taken = in_use;
  for (const auto* s : slots) taken.insert(s->name);

  std::map<std::string, std::string> renaming;
  for (const auto* s : slots) {
    const std::string& name = s->name;
    if (free.contains(name) || renaming.contains(name) || !in_use.contains(name)) continue;
    const IndexSet* set = reg.index_set_of(name);
    if (set == nullptr) continue;
    const std::string fresh = fresh_dummy(*set, taken);
    taken.insert(fresh);
    renaming.emplace(name, fresh);
  }
  rename_indices(inserted, renaming, reg);
  for (const auto& n : index_names(inserted, reg)) in_use.insert(n);
  return inserted;
}

Expression relabel_on_insert(const Expression& host_term, Expression inserted, const PropertyRegistry& reg) {
  std::set<std::string> in_use = index_names(host_term, reg);
  return relabel_on_insert(std::move(inserted), in_use, reg);
}

void rename_dummies_in_term(Expression& term, const PropertyRegistry& reg) {
  std::vector<const ExprNode*> slots;
  all_slots(term, reg, slots);
  if (slots.empty()) return;
  const auto cls = classify_indices(term, reg);
  std::set<std::string> used;
  for (const auto& f : cls.free) used.insert(f.name);
  std::map<std::string, std::size_t> counts;
  for (const auto* s : slots) ++counts[s->name];
  const auto is_free = [&](const std::string& name) {
    return std::any_of(cls.free.begin(), cls.free.end(), [&](const auto& f) { return f.name == name; });
  };

  std::map<std::string, std::string> renaming;
  for (const auto* s : slots) {
    const std::string& name = s->name;
    if (renaming.contains(name) || counts[name] < 2 || is_free(name)) continue;
    const IndexSet* set = reg.index_set_of(name);
    if (set == nullptr) continue;
    const std::string fresh = fresh_dummy(*set, used);
    used.insert(fresh);
    renaming.emplace(name, fresh);
  }
  std::erase_if(renaming, [](const auto& kv) { return kv.first == kv.second; });
  rename_indices(term, renaming, reg);
}

Expression rename_dummies(Expression e, const PropertyRegistry& reg) {
  for_each_term(e, [&](ExprNode& t) { rename_dummies_in_term(t, reg); });
  return e;
}

IndexOrdinal index_ordinal(std::string_view name, const PropertyRegistry& reg) {
  if (const IndexSet* set = reg.index_set_of(name)) return IndexOrdinal{set->order, set->position_of(name), {}};
  return IndexOrdinal{std::numeric_limits<std::size_t>::max(), 0, std::string(name)};
}

} // namespace tensorpad

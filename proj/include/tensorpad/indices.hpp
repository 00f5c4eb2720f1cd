#pragma once

#include "tensorpad/expr.hpp"
#include "tensorpad/properties.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace tensorpad {

struct IndexOccurrence {
  std::string name;
  ParentRel rel = ParentRel::Subscript;
  std::size_t position = 0;  // slot number in index_iterator order
};

struct IndexClassification {
  std::vector<IndexOccurrence> free;
  std::vector<std::pair<IndexOccurrence, IndexOccurrence>> dummy;

  std::vector<std::string> free_names() const;
  std::vector<std::string> dummy_names() const;
};

/// Free and dummy indices of one term. Indices inside a nested sum count
/// once, through the free indices of that sum.
/// Throws Error when a name occurs three or more times.
IndexClassification classify_indices(const Expression& term, const PropertyRegistry& reg);

/// Index slots a node shows to its surroundings; a nested sum contributes
/// the free indices of its first term.
std::vector<IndexOccurrence> exposed_indices(const Expression& e, const PropertyRegistry& reg);

/// Every index name anywhere below e, nested sums included.
std::set<std::string> index_names(const Expression& e, const PropertyRegistry& reg);

/// First unused explicit member, else q1, q2, ... from the generator.
std::string fresh_dummy(const IndexSet& set, const std::set<std::string>& in_use);

/// Renames the inserted subtree's dummies that collide with `in_use`, using
/// fresh names from each dummy's own index set. `in_use` grows by every name
/// the returned subtree carries.
Expression relabel_on_insert(Expression inserted, std::set<std::string>& in_use, const PropertyRegistry& reg);
Expression relabel_on_insert(const Expression& host_term, Expression inserted, const PropertyRegistry& reg);

/// Gives every dummy pair the earliest member of its set that is neither a
/// free index nor already handed out, in order of first occurrence.
Expression rename_dummies(Expression e, const PropertyRegistry& reg);
void rename_dummies_in_term(Expression& term, const PropertyRegistry& reg);

/// Renames index children (anywhere below e) according to the map.
void rename_indices(Expression& e, const std::map<std::string, std::string>& renaming,
                    const PropertyRegistry& reg);

/// Comparable position of an index name: (set order, position within set),
/// undeclared names after all sets.
struct IndexOrdinal {
  std::size_t set = 0;
  std::size_t position = 0;
  std::string name;

  friend auto operator<=>(const IndexOrdinal&, const IndexOrdinal&) = default;
};
IndexOrdinal index_ordinal(std::string_view name, const PropertyRegistry& reg);

} // namespace tensorpad

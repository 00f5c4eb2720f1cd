#pragma once

#include "tensorpad/error.hpp"
#include "tensorpad/expr.hpp"
#include "tensorpad/tableau.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tensorpad {

enum class PropertyKind {
  Indices,
  Integer,
  Symmetric,
  AntiSymmetric,
  TableauSymmetry,
  RiemannTensor,
  WeylTensor,
  KroneckerDelta,
  Derivative,
  PartialDerivative,
  Depends,
  AntiCommuting,
  SelfAntiCommuting,
  NonCommuting,
  CommutingAsProduct,
  CommutingAsSum,
  SortOrder,
  Spinor,
  GammaMatrix,
  Accent,
  DiracBar,
  PropertyInherit,
  IndexInherit,
  NonIndex,
};

std::optional<PropertyKind> property_kind_from_name(std::string_view name);
std::string_view property_kind_name(PropertyKind kind);
/// Kinds whose record is attached to the whole list of declared patterns.
bool is_list_property(PropertyKind kind);

/// Left-hand side of a declaration. A name ending in '#' denotes a family of
/// generated names (q# matches q1, q2, ...); a single '#' child matches any
/// arrangement of children. Sub/superscript children match any index.
class Pattern {
public:
  explicit Pattern(ExprNode node);

  const ExprNode& node() const noexcept { return node_; }
  bool is_family() const noexcept { return family_; }
  /// Name without the trailing '#'.
  const std::string& stem() const noexcept { return stem_; }
  bool matches(const ExprNode& n) const;
  /// Whether a bare name (no children) belongs to this pattern.
  bool matches_name(std::string_view name) const;
  std::string text() const;

  friend bool operator==(const Pattern& a, const Pattern& b);

private:
  ExprNode node_;
  std::string stem_;
  bool family_ = false;
};

struct PropertyArg {
  std::string key;  // empty for positional arguments
  std::string value;
};

struct PropertyRecord {
  PropertyKind kind{};
  std::vector<PropertyArg> args;
  std::vector<Pattern> list_members;
  std::optional<YoungTableau> tableau;
  bool traceless = false;
  /// PropertyInherit(Kind, ...) forwards only these kinds; empty means all.
  std::vector<PropertyKind> inherit_only;

  /// Named argument, or the positional one at `position` when no key matches.
  std::optional<std::string> arg(std::string_view key, std::size_t position = std::string::npos) const;
};

/// Builds a record from a property name and its arguments, expanding the
/// RiemannTensor/WeylTensor presets and parsing TableauSymmetry arguments.
PropertyRecord make_record(PropertyKind kind, std::vector<PropertyArg> args = {});

struct IndexSet {
  std::string name;
  std::vector<std::string> members;
  std::string generator;  // stem of the q# family, empty when absent
  std::optional<int> dimension;
  std::size_t order = 0;  // declaration order among sets

  bool contains(std::string_view index_name) const;
  /// Position used for canonical ordering: members first, then q, q1, q2, ...
  std::size_t position_of(std::string_view index_name) const;
};

class PropertyConflict : public Error {
public:
  using Error::Error;
};

/// Pattern -> property map with inheritance-aware lookup.
class PropertyRegistry {
public:
  struct Entry {
    Pattern pattern;
    PropertyRecord record;
    std::size_t declaration = 0;
  };

  /// Attaches record to every pattern. Throws PropertyConflict on a
  /// Symmetric/AntiSymmetric/TableauSymmetry contradiction; later
  /// declarations of the same pattern and kind replace earlier ones.
  /// Non-fatal remarks (overlapping SortOrder lists) land in warnings().
  void declare(const std::vector<Pattern>& patterns, PropertyRecord record);

  /// Resolution: direct match, then inheritance through Accent, DiracBar and
  /// PropertyInherit nodes, then forwarding through derivatives.
  const PropertyRecord* query(const ExprNode& node, PropertyKind kind) const;
  const PropertyRecord* query_direct(const ExprNode& node, PropertyKind kind) const;
  bool has(const ExprNode& node, PropertyKind kind) const { return query(node, kind) != nullptr; }
  bool has_direct(const ExprNode& node, PropertyKind kind) const {
    return query_direct(node, kind) != nullptr;
  }

  /// Every (pattern, record) pair whose pattern matches the node directly.
  std::vector<const Entry*> properties_of(const ExprNode& node) const;
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  const IndexSet* index_set_of(std::string_view index_name) const;
  const std::vector<IndexSet>& index_sets() const noexcept { return sets_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Node inherits properties and indices from its argument children.
  bool is_inheriting(const ExprNode& node) const;
  bool is_derivative(const ExprNode& node) const;

  /// True when a symbol is declared to depend on something but not on the
  /// given derivative symbol.
  bool is_constant_under(const ExprNode& node, std::string_view derivative) const;

private:
  void register_indices(const std::vector<Pattern>& patterns, const PropertyRecord& record);
  void register_integer_range(const std::vector<Pattern>& patterns, const PropertyRecord& record);

  std::vector<Entry> entries_;
  std::vector<IndexSet> sets_;
  std::vector<std::string> warnings_;
  std::size_t declarations_ = 0;
};

/// +1 if the factors commute, -1 if they anticommute, nullopt when they do
/// not commute at all. Products, derivatives and accents take the combined
/// parity of their constituents.
std::optional<int> commutation_sign(const PropertyRegistry& reg, const ExprNode& a, const ExprNode& b);

/// Tableau governing a node's slots (direct, inherited or derived from
/// Symmetric/AntiSymmetric), if any.
std::optional<YoungTableau> tableau_of(const PropertyRegistry& reg, const ExprNode& node,
                                       std::size_t slot_count);

} // namespace tensorpad

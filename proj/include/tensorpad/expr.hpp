#pragma once

#include "tensorpad/rational.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tensorpad {

class PropertyRegistry;

/// How a child node hangs off its parent.
enum class ParentRel : std::uint8_t { NoRelation, Superscript, Subscript, Argument };

/// Bracket style of an argument child. Printing only; ignored by comparisons.
enum class Bracket : std::uint8_t { None, Round, Curly };

/// Reserved structural node names.
namespace names {
inline const std::string sum = "\\sum";
inline const std::string prod = "\\prod";
inline const std::string integral = "\\int";
inline const std::string list = "\\comma";
inline const std::string equals = "\\equals";
inline const std::string arrow = "\\arrow";
/// Numbers are stored as this name with the value in the multiplier.
inline const std::string number = "1";
} // namespace names

/// A node of the expression tree. A tree is identified with its root node.
///
/// Multipliers live on every node, but after normalize() only term roots
/// (children of a \sum, or a lone expression) and numbers carry a value
/// other than one.
struct ExprNode {
  std::string name;
  Rational multiplier{1};
  ParentRel rel = ParentRel::NoRelation;
  Bracket bracket = Bracket::None;
  std::vector<ExprNode> children;

  ExprNode() = default;
  explicit ExprNode(std::string n, ParentRel r = ParentRel::NoRelation)
      : name(std::move(n)), rel(r) {}

  bool is_sum() const noexcept { return name == names::sum; }
  bool is_prod() const noexcept { return name == names::prod; }
  bool is_list() const noexcept { return name == names::list; }
  bool is_integral() const noexcept { return name == names::integral; }
  bool is_rule() const noexcept { return name == names::equals || name == names::arrow; }
  bool is_number() const noexcept { return name == names::number && children.empty(); }
  bool is_zero() const noexcept { return multiplier.is_zero(); }
  bool is_index_slot() const noexcept {
    return rel == ParentRel::Superscript || rel == ParentRel::Subscript;
  }

  ExprNode& add(ExprNode child, ParentRel r) {
    child.rel = r;
    children.push_back(std::move(child));
    return children.back();
  }
};

using Expression = ExprNode;

ExprNode make_number(const Rational& value);
ExprNode make_zero();
ExprNode make_symbol(std::string name);
ExprNode make_index(std::string name, ParentRel rel = ParentRel::Subscript);
/// Tensor with all-subscript indices, e.g. make_tensor("R", {"a","b","c","d"}).
ExprNode make_tensor(std::string name, const std::vector<std::string>& subscripts);
ExprNode make_sum(std::vector<ExprNode> terms);
ExprNode make_prod(std::vector<ExprNode> factors);
ExprNode make_list(std::vector<ExprNode> items);

/// Flattens sums and products, funnels multipliers to term level, drops zero
/// terms and collapses degenerate sums/products. Empty sums become 0.
ExprNode normalize(ExprNode e);
void normalize_in_place(ExprNode& e);

/// Structural equality; the top-level multiplier is compared only when asked.
bool equal_subtree(const ExprNode& a, const ExprNode& b, bool compare_multiplier);

/// Serialization used as a hash key. Two trees have the same key iff they are
/// equal_subtree with the same multiplier flag.
std::string structure_key(const ExprNode& e, bool include_multiplier);

/// Factors of a term: the children of a product, otherwise the term itself.
std::vector<ExprNode*> term_factors(ExprNode& term);
std::vector<const ExprNode*> term_factors(const ExprNode& term);

/// Applies f to every term reachable through lists and sums (a term is any
/// node that is neither a sum nor a list). Renormalizes afterwards.
void for_each_term(ExprNode& e, const std::function<void(ExprNode&)>& f);

/// Total number of nodes, handy for diagnostics.
std::size_t node_count(const ExprNode& e);

/// Index slots visible at node n, in tree order. Children of index-inheriting
/// nodes (products, sums, integrals, derivatives, accents, IndexInherit) are
/// visited before the node's own sub/superscripts; NonIndex symbols and
/// numbers are skipped.
std::vector<const ExprNode*> index_iterator(const ExprNode& n, const PropertyRegistry& reg);
std::vector<ExprNode*> index_iterator(ExprNode& n, const PropertyRegistry& reg);

/// Whether a sub/superscript child denotes an index.
bool is_index(const ExprNode& child, const PropertyRegistry& reg);

} // namespace tensorpad

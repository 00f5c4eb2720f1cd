#pragma once

#include "tensorpad/error.hpp"
#include "tensorpad/expr.hpp"
#include "tensorpad/properties.hpp"
#include "tensorpad/tableau.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tensorpad {

/// A rearrangement of tensor slots: slot k of the result holds what slot
/// perm[k] held before.
using Permutation = std::vector<int>;

struct SignedPermutation {
  Permutation perm;
  int sign = 1;
};

struct SlotPermutationSum {
  struct Term {
    Permutation perm;
    Rational weight;
  };
  std::vector<Term> terms;
};

/// Elements of the mono-term symmetry group of a tableau on `slot_count`
/// slots: column antisymmetries plus exchanges of equal-length columns.
/// The identity comes first.
std::vector<SignedPermutation> mono_term_group(const YoungTableau& tab, int slot_count);

/// Row symmetrizer followed by column antisymmetrizer, divided by the
/// product of hook lengths so that the operator is idempotent.
SlotPermutationSum young_projector(const YoungTableau& tab, int slot_count);

/// young_projector with each permuted term reduced to its representative
/// under the mono-term group and collected.
SlotPermutationSum reduced_young_projector(const YoungTableau& tab, int slot_count);

/// Mono-term group of a factor, from its own or inherited tableau; empty
/// when the factor carries no symmetry.
std::vector<SignedPermutation> factor_symmetry(const ExprNode& factor, const PropertyRegistry& reg);

/// Total order used when sorting factors of a product: SortOrder position,
/// then name, then number of indices.
struct FactorSortKey {
  std::string group;
  std::size_t position = 0;
  std::string name;
  std::size_t index_count = 0;

  friend auto operator<=>(const FactorSortKey&, const FactorSortKey&) = default;
};
FactorSortKey factor_sort_key(const ExprNode& factor, const PropertyRegistry& reg);

/// Canonical representative of every term: factors reordered as far as
/// commutation allows, slots permuted within each factor's mono-term group,
/// dummies renamed by first occurrence. Terms equal to minus themselves
/// become zero.
Expression canonicalise(const Expression& e, const PropertyRegistry& reg);
void canonicalise_term(Expression& term, const PropertyRegistry& reg);

/// Per-factor slot sorting by mono-term moves only.
Expression indexsort(const Expression& e, const PropertyRegistry& reg);

/// Replaces every tensor by its Young projection, expands, canonicalises and
/// collects. Throws Error for an indexed factor without a tableau.
Expression young_project(const Expression& e, const PropertyRegistry& reg);

struct SlotSpec {
  std::string name;
  std::optional<ParentRel> rel;  // unset: any position
};

/// Antisymmetrizes over the given index slots with weight 1/k!.
Expression asym(const Expression& e, const std::vector<SlotSpec>& slots, const PropertyRegistry& reg);

/// All independent full contractions of a monomial with free indices.
std::vector<Expression> all_contractions(const Expression& monomial, const PropertyRegistry& reg);

class BasisDependent : public Error {
public:
  BasisDependent(const std::string& message, std::vector<Rational> certificate)
      : Error(message), certificate_(std::move(certificate)) {}
  const std::vector<Rational>& certificate() const noexcept { return certificate_; }

private:
  std::vector<Rational> certificate_;
};

/// Exact coordinates of projected monomials.
struct MonomialBasis {
  std::vector<Expression> elements;
  std::vector<std::string> columns;  // keys of the projected terms
  std::vector<std::vector<Rational>> projected_matrix;
  std::size_t rank = 0;
};

using CoefficientVector = std::vector<Rational>;

MonomialBasis build_basis(const std::vector<Expression>& monomials, const PropertyRegistry& reg);

/// Coordinates of e on the basis; throws Error("not in span") otherwise.
CoefficientVector decompose(const Expression& e, const MonomialBasis& basis, const PropertyRegistry& reg);

/// Folds every term that is a combination of earlier kept terms into them.
Expression reduce_sum(const Expression& e, const PropertyRegistry& reg);

} // namespace tensorpad

#pragma once

#include "tensorpad/expr.hpp"
#include "tensorpad/properties.hpp"

#include <string>
#include <vector>

namespace tensorpad {

struct Rule {
  Expression lhs;
  Expression rhs;
};

/// Ordered replacement rules; "=" and "->" mean the same.
struct RuleSet {
  std::vector<Rule> rules;

  /// Accepts one rule or a list of rules. Throws Error on anything else or
  /// when the two sides of a rule carry different free indices.
  static RuleSet from_expression(const Expression& e, const PropertyRegistry& reg);
};

struct CommandResult {
  Expression expression;
  bool applied = false;
  std::vector<std::string> diagnostics;
};

/// One outermost-first pass: every subtree matching a rule is replaced and
/// not revisited. Rule indices bind positionally; the image's dummies are
/// renamed away from every index name of the enclosing top-level term.
CommandResult substitute(const Expression& e, const RuleSet& rules, const PropertyRegistry& reg);

/// Expands products over sums, keeping factor order.
Expression distribute(const Expression& e);

/// Leibniz rule for derivatives acting on products.
Expression prodrule(const Expression& e, const PropertyRegistry& reg);

/// Integration by parts of the named derivative inside integrals (or on the
/// top-level terms when there is no integral). Total derivatives vanish.
Expression pintegrate(const Expression& e, const std::string& derivative, const PropertyRegistry& reg);

/// First-order variation: each term becomes the sum over single-factor
/// replacements, entering derivative and accent arguments.
Expression vary(const Expression& e, const RuleSet& rules, const PropertyRegistry& reg);

/// Merges terms that differ only by their multiplier.
Expression collect_terms(const Expression& e);

/// Sorts the factors of every product by adjacent transpositions that the
/// commutation rules allow, tracking signs.
Expression prodsort(const Expression& e, const PropertyRegistry& reg);

/// A sum of lists adds element-wise; a single list becomes the sum of its
/// entries.
Expression list_sum(const Expression& e, const PropertyRegistry& reg);

} // namespace tensorpad

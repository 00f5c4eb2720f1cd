#pragma once

#include "tensorpad/rational.hpp"

#include <optional>
#include <vector>

namespace tensorpad {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Rank over the rationals, by fraction-free (Bareiss) elimination.
std::size_t matrix_rank(const RationalMatrix& rows);

/// Some solution x of A x = b (free variables set to zero), or nullopt when
/// the system is inconsistent. A is given row-wise; every row has the same
/// length as x.
std::optional<std::vector<Rational>> solve_linear(const RationalMatrix& a, const std::vector<Rational>& b);

/// Coefficients c, not all zero, with sum_i c_i rows[i] = 0, scaled to
/// coprime integers with a positive leading entry; nullopt when the rows are
/// independent.
std::optional<std::vector<Rational>> row_dependency(const RationalMatrix& rows);

} // namespace tensorpad

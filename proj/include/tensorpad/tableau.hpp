#pragma once

#include <cstddef>
#include <vector>

namespace tensorpad {

/// Young tableau whose cells hold tensor slot numbers (0-based).
struct YoungTableau {
  std::vector<std::vector<int>> rows;

  /// Builds from a shape and a row-major filling; throws Error when the
  /// shape is not weakly decreasing or the filling has the wrong size.
  static YoungTableau from_shape(const std::vector<int>& shape, const std::vector<int>& filling);
  /// One row holding slots 0..n-1.
  static YoungTableau row(int n);
  /// One column holding slots 0..n-1.
  static YoungTableau column(int n);
  /// The {2,2} tableau used for Riemann and Weyl tensors: rows (0,2) and (1,3).
  static YoungTableau riemann();

  std::vector<int> shape() const;
  std::size_t cell_count() const;
  std::vector<std::vector<int>> columns() const;
  /// Largest slot number plus one.
  int slot_span() const;

  friend bool operator==(const YoungTableau&, const YoungTableau&) = default;
};

} // namespace tensorpad

#include "tensorpad/tableau.hpp"

#include "tensorpad/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tensorpad {

YoungTableau YoungTableau::from_shape(const std::vector<int>& shape, const std::vector<int>& filling) {
  if (shape.empty()) throw Error("tableau shape is empty");
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] <= 0) throw Error("tableau row lengths must be positive");
    if (i > 0 && shape[i] > shape[i - 1]) throw Error("tableau shape must be weakly decreasing");
  }
  const int cells = std::accumulate(shape.begin(), shape.end(), 0);
  if (static_cast<int>(filling.size()) != cells)
    throw Error("tableau filling has " + std::to_string(filling.size()) + " entries, shape needs " +
                std::to_string(cells));
  std::set<int> seen;
  for (int s : filling) {
    if (s < 0) throw Error("tableau slot numbers must be non-negative");
    if (!seen.insert(s).second) throw Error("tableau filling repeats slot " + std::to_string(s));
  }
  YoungTableau t;
  std::size_t k = 0;
  for (int len : shape) {
    t.rows.emplace_back(filling.begin() + static_cast<long>(k), filling.begin() + static_cast<long>(k + len));
    k += static_cast<std::size_t>(len);
  }
  return t;
}

YoungTableau YoungTableau::row(int n) {
  std::vector<int> fill(static_cast<std::size_t>(n));
  std::iota(fill.begin(), fill.end(), 0);
  return from_shape({n}, fill);
}

YoungTableau YoungTableau::column(int n) {
  std::vector<int> fill(static_cast<std::size_t>(n));
  std::iota(fill.begin(), fill.end(), 0);
  return from_shape(std::vector<int>(static_cast<std::size_t>(n), 1), fill);
}

YoungTableau YoungTableau::riemann() { return from_shape({2, 2}, {0, 2, 1, 3}); }

std::vector<int> YoungTableau::shape() const {
  std::vector<int> s;
  for (const auto& r : rows) s.push_back(static_cast<int>(r.size()));
  return s;
}

std::size_t YoungTableau::cell_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

std::vector<std::vector<int>> YoungTableau::columns() const {
  std::vector<std::vector<int>> cols;
  if (rows.empty()) return cols;
  cols.resize(rows.front().size());
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.size(); ++j) cols[j].push_back(r[j]);
  return cols;
}

int YoungTableau::slot_span() const {
  int m = -1;
  for (const auto& r : rows)
    for (int s : r) m = std::max(m, s);
  return m + 1;
}

} // namespace tensorpad

#include "tensorpad/linalg.hpp"

#include "tensorpad/error.hpp"

#include <algorithm>

namespace tensorpad {

namespace {

using IntMatrix = std::vector<std::vector<mpz_class>>;

// Clears denominators row by row.
IntMatrix to_integer_rows(const RationalMatrix& m) {
  IntMatrix out;
  out.reserve(m.size());
  for (const auto& row : m) {
    mpz_class l = 1;
    for (const auto& x : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.denominator().get_mpz_t());
    std::vector<mpz_class> r;
    r.reserve(row.size());
    for (const auto& x : row) r.push_back(x.numerator() * (l / x.denominator()));
    out.push_back(std::move(r));
  }
  return out;
}

// In-place Bareiss elimination restricted to the first `cols` columns.
// Returns the pivot column of each of the leading rows.
std::vector<std::size_t> bareiss(IntMatrix& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  mpz_class prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[r], a[p]);
    for (std::size_t i = r + 1; i < a.size(); ++i) {
      for (std::size_t j = c + 1; j < a[i].size(); ++j) {
        a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]);
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// Back substitution on an echelon form; free variables are zero.
std::vector<Rational> back_substitute(const IntMatrix& a, const std::vector<std::size_t>& pivots,
                                      std::size_t cols, std::size_t rhs_col) {
  std::vector<Rational> x(cols, Rational(0));
  for (std::size_t k = pivots.size(); k-- > 0;) {
    const std::size_t c = pivots[k];
    Rational acc = rhs_col < a[k].size() ? Rational(a[k][rhs_col], 1) : Rational(0);
    for (std::size_t j = c + 1; j < cols; ++j)
      if (!x[j].is_zero()) acc -= Rational(a[k][j], 1) * x[j];
    x[c] = acc / Rational(a[k][c], 1);
  }
  return x;
}

} // namespace

std::size_t matrix_rank(const RationalMatrix& rows) {
  if (rows.empty()) return 0;
  IntMatrix a = to_integer_rows(rows);
  return bareiss(a, a.front().size()).size();
}

std::optional<std::vector<Rational>> solve_linear(const RationalMatrix& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw Error("solve_linear: row count does not match right-hand side");
  const std::size_t cols = a.empty() ? 0 : a.front().size();
  RationalMatrix aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) {
    if (aug[i].size() != cols) throw Error("solve_linear: ragged matrix");
    aug[i].push_back(b[i]);
  }
  IntMatrix m = to_integer_rows(aug);
  const auto pivots = bareiss(m, cols);
  for (std::size_t i = pivots.size(); i < m.size(); ++i)
    if (m[i][cols] != 0) return std::nullopt;
  return back_substitute(m, pivots, cols, cols);
}

std::optional<std::vector<Rational>> row_dependency(const RationalMatrix& rows) {
  if (rows.empty()) return std::nullopt;
  const std::size_t n = rows.size();
  const std::size_t len = rows.front().size();
  // Columns of the transposed system are the original rows.
  RationalMatrix t(len, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < len; ++j) t[j][i] = rows[i][j];
  IntMatrix m = to_integer_rows(t);
  if (m.empty()) m.assign(1, std::vector<mpz_class>(n, 0));
  const auto pivots = bareiss(m, n);
  if (pivots.size() == n) return std::nullopt;
  std::size_t free_col = 0;
  while (std::find(pivots.begin(), pivots.end(), free_col) != pivots.end()) ++free_col;

  // Solve with the chosen free variable set to one.
  for (auto& row : m) row.push_back(-row[free_col]);
  std::vector<Rational> x = back_substitute(m, pivots, n, n);
  x[free_col] = Rational(1);

  mpz_class l = 1;
  for (const auto& v : x) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.denominator().get_mpz_t());
  mpz_class g = 0;
  for (const auto& v : x) {
    const mpz_class k = v.numerator() * (l / v.denominator());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_mpz_t());
  }
  int lead = 0;
  for (const auto& v : x)
    if (!v.is_zero()) {
      lead = v.sign();
      break;
    }
  const Rational scale = Rational(l * lead, g);
  for (auto& v : x) v = v * scale;
  return x;
}

} // namespace tensorpad

#include "tensorpad/linalg.hpp"

#include <gtest/gtest.h>

using namespace tensorpad;

namespace {
Rational q(const char* s) { return Rational::parse(s); }
}

TEST(Linalg, RankOfDependentRows) {
  const RationalMatrix m{{1, 2, 3}, {2, 4, 6}, {0, 1, q("1/2")}};
  EXPECT_EQ(matrix_rank(m), 2u);
  EXPECT_EQ(matrix_rank({}), 0u);
  EXPECT_EQ(matrix_rank({{0, 0}, {0, 0}}), 0u);
}

TEST(Linalg, HilbertMatrixIsExactlyInvertible) {
  const int n = 8;
  RationalMatrix h(n, std::vector<Rational>(n));
  std::vector<Rational> ones(n, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h[i][j] = Rational(1) / Rational(i + j + 1);
  EXPECT_EQ(matrix_rank(h), static_cast<std::size_t>(n));
  const auto x = solve_linear(h, ones);
  ASSERT_TRUE(x.has_value());
  for (int i = 0; i < n; ++i) {
    Rational s;
    for (int j = 0; j < n; ++j) s += h[i][j] * (*x)[j];
    EXPECT_EQ(s, Rational(1));
  }
}

TEST(Linalg, InconsistentSystem) {
  EXPECT_FALSE(solve_linear({{1, 1}, {2, 2}}, {1, 3}).has_value());
  const auto x = solve_linear({{1, 1}, {2, 2}}, {1, 2});
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ((*x)[0] + (*x)[1], Rational(1));
}

TEST(Linalg, DependencyIsPrimitiveWithPositiveLead) {
  const auto d = row_dependency({{2, 0}, {0, 3}, {q("1/2"), 1}});
  ASSERT_TRUE(d.has_value());
  EXPECT_GT((*d)[0].sign() != 0 ? (*d)[0].sign() : ((*d)[1].sign() != 0 ? (*d)[1].sign() : (*d)[2].sign()), 0);
  for (const auto& c : *d) EXPECT_TRUE(c.is_integer());
  EXPECT_EQ((*d)[0] * 2 + (*d)[2] * q("1/2"), Rational(0));
  EXPECT_EQ((*d)[1] * 3 + (*d)[2], Rational(0));
  EXPECT_FALSE(row_dependency({{1, 0}, {0, 1}}).has_value());
}

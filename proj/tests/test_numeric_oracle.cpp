#include "support.hpp"

#include "tensorpad/algorithms.hpp"
#include "tensorpad/symmetry.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

using namespace tensorpad;
using tptest::close;
using tptest::Evaluator;
using tptest::NumericTensor;
using tptest::session_with;
using tptest::tex;

namespace {

Session riemann_session() {
  return session_with({"{a,b,c,d,e,f,m,n,p,q,r,s,t,u,v,w,q#}::Indices(vector).", "R_{a b c d}::RiemannTensor."});
}

Evaluator riemann_evaluator(const NumericTensor& r) {
  auto [ric, scalar] = tptest::ricci_parts(r);
  return Evaluator({{"R/4", r}, {"R/2", ric}, {"R/0", scalar}}, r.dim);
}

}  // namespace

TEST(NumericOracle, GeneratorHasRiemannSymmetries) {
  std::mt19937 rng(11);
  const auto r = tptest::random_riemann(4, rng);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          EXPECT_TRUE(close(r.at({a, b, c, d}), -r.at({b, a, c, d})));
          EXPECT_TRUE(close(r.at({a, b, c, d}), r.at({c, d, a, b})));
          EXPECT_TRUE(close(r.at({a, b, c, d}) + r.at({a, c, d, b}) + r.at({a, d, b, c}), 0.0));
        }
}

TEST(NumericOracle, ProjectedRiemannEqualsOriginal) {
  auto s = riemann_session();
  const auto projected = young_project(parse("R_{a b c d}"), s.registry());
  std::mt19937 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ev = riemann_evaluator(tptest::random_riemann(4, rng));
    for (int i = 0; i < 256; ++i) {
      const std::map<std::string, int> fixed{{"a", i & 3}, {"b", (i >> 2) & 3}, {"c", (i >> 4) & 3}, {"d", (i >> 6) & 3}};
      EXPECT_TRUE(close(ev(projected, fixed), ev(parse("R_{a b c d}"), fixed)));
    }
  }
}

TEST(NumericOracle, QuadraticContractionRelation) {
  std::mt19937 rng(13);
  for (int dim : {3, 4, 6}) {
    const auto ev = riemann_evaluator(tptest::random_riemann(dim, rng));
    EXPECT_TRUE(close(ev(parse("R_{a b c d} R_{a b c d}")), 2 * ev(parse("R_{a b c d} R_{a c b d}"))));
  }
}

TEST(NumericOracle, CanonicalisePreservesValue) {
  auto s = riemann_session();
  std::mt19937 rng(14);
  const auto ev = riemann_evaluator(tptest::random_riemann(4, rng));
  const std::vector<std::string> idx{"a", "b", "c", "d", "e", "f", "m", "n"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> names;
    for (int k = 0; k < 4; ++k) names.push_back(idx[k]), names.push_back(idx[k]);
    std::shuffle(names.begin(), names.end(), rng);
    const auto e = parse("R_{" + names[0] + " " + names[1] + " " + names[2] + " " + names[3] + "} R_{" + names[4] + " " +
                         names[5] + " " + names[6] + " " + names[7] + "}");
    const auto c = canonicalise(e, s.registry());
    EXPECT_TRUE(close(ev(e), ev(c))) << tex(e) << " -> " << tex(c);
  }
}

TEST(NumericOracle, CubicBasisIsIndependentWithPublishedSpan) {
  Session s;
  s.eval_text(
      "{m,n,p,q,r,s,t,u,v,w,a,b}::Indices(vector).\n"
      "R_{m n p q}::RiemannTensor.\n"
      "basisR3:= R_{m n p q} R_{r s t u} R_{v w a b};\n"
      "@all_contractions(%);\n"
      "@canonicalise!(%);\n"
      "@substitute!(%)( R_{m n m p} -> R_{n p} );\n"
      "@substitute!(%)( R_{m m} -> R );\n");
  const auto basis = *s.lookup("basisR3");
  ASSERT_TRUE(basis.is_list());
  ASSERT_EQ(basis.children.size(), 8u);
  const std::vector<std::string> published{
      "R_{m n p q} R_{m p r s} R_{n r q s}", "R R_{q r} R_{q r}",   "R_{n p} R_{n q p r} R_{q r}",
      "R_{n p} R_{n q r s} R_{p r q s}",     "R R_{p q r s} R_{p q r s}", "R_{n p} R_{n r} R_{p r}",
      "R_{m n p q} R_{m r p s} R_{n r q s}", "R R R"};
  std::mt19937 rng(15);
  const int samples = 20;
  Eigen::MatrixXd values(samples, 16);
  for (int k = 0; k < samples; ++k) {
    const auto ev = riemann_evaluator(tptest::random_riemann(6, rng, 4));
    for (int j = 0; j < 8; ++j) {
      values(k, j) = ev(basis.children[static_cast<std::size_t>(j)]);
      values(k, 8 + j) = ev(parse(published[static_cast<std::size_t>(j)]));
    }
  }
  values.rowwise().normalize();
  auto rank = [](const Eigen::MatrixXd& m) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-8);
    return lu.rank();
  };
  EXPECT_EQ(rank(values.leftCols(8)), 8);
  EXPECT_EQ(rank(values.rightCols(8)), 8);
  EXPECT_EQ(rank(values), 8);
}

TEST(NumericOracle, WeylQuarticIdentity) {
  const char* lhs = "W_{p q r s} W_{p t r u} W_{t v q w} W_{u v s w} - W_{p q r s} W_{p q t u} W_{r v t w} W_{s v u w}";
  const char* w2 = "W_{m n a b} W_{n p b c} W_{m s c d} W_{s p d a}";
  const char* w6 = "W_{m n a b} W_{p s b a} W_{m p c d} W_{n s d c}";
  std::mt19937 rng(16);
  for (int dim : {5, 6}) {
    const auto w = tptest::weyl_part(tptest::random_riemann(dim, rng));
    const Evaluator ev({{"W", w}}, dim);
    const double l = ev(parse(lhs));
    const double r = ev(parse(w2)) - 0.25 * ev(parse(w6));
    EXPECT_TRUE(close(l, r, 1e-8)) << "dim " << dim << ": " << l << " vs " << r;
  }
}

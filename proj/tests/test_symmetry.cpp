#include "support.hpp"

#include "tensorpad/algorithms.hpp"
#include "tensorpad/symmetry.hpp"

#include <gtest/gtest.h>

using namespace tensorpad;
using tptest::session_with;
using tptest::tex;

namespace {
Session riemann_session() {
  return session_with({"{a,b,c,d,e,f,m,n,p,q#}::Indices(vector).", "R_{a b c d}::RiemannTensor."});
}
}  // namespace

TEST(Tableau, ShapesAndColumns) {
  const auto t = YoungTableau::from_shape({2, 1}, {0, 1, 2});
  EXPECT_EQ(t.shape(), (std::vector<int>{2, 1}));
  EXPECT_EQ(t.columns(), (std::vector<std::vector<int>>{{0, 2}, {1}}));
  EXPECT_EQ(t.cell_count(), 3u);
  EXPECT_THROW(YoungTableau::from_shape({1, 2}, {0, 1, 2}), Error);
  EXPECT_THROW(YoungTableau::from_shape({2}, {0}), Error);
  EXPECT_EQ(YoungTableau::riemann().rows, (std::vector<std::vector<int>>{{0, 2}, {1, 3}}));
}

TEST(MonoTermGroup, RiemannHasEightElements) {
  const auto g = mono_term_group(YoungTableau::riemann(), 4);
  ASSERT_EQ(g.size(), 8u);
  EXPECT_EQ(g.front().perm, (Permutation{0, 1, 2, 3}));
  EXPECT_EQ(g.front().sign, 1);
  int negative = 0;
  for (const auto& s : g) negative += s.sign < 0;
  EXPECT_EQ(negative, 4);
}

TEST(YoungProjector, WeightsSumToOneOverHookForRows) {
  const auto p = young_projector(YoungTableau::row(3), 3);
  ASSERT_EQ(p.terms.size(), 6u);
  for (const auto& t : p.terms) EXPECT_EQ(t.weight, Rational::parse("1/6"));
  const auto c = young_projector(YoungTableau::column(3), 3);
  Rational total;
  for (const auto& t : c.terms) total += t.weight;
  EXPECT_EQ(total, Rational(0));
}

TEST(YoungProject, RiemannGoldenFormula) {
  auto s = riemann_session();
  const auto out = young_project(parse("R_{a b c d}"), s.registry());
  const auto expect = canonicalise(parse("2/3 R_{a b c d} - 1/3 R_{a d b c} + 1/3 R_{a c b d}"), s.registry());
  EXPECT_TRUE(tptest::equal_as_sums(out, expect)) << tex(out);
}

TEST(YoungProject, CyclicIdentityVanishes) {
  auto s = riemann_session();
  const auto out = young_project(parse("R_{m n p q} + R_{m p q n} + R_{m q n p}"), s.registry());
  EXPECT_TRUE(out.is_zero()) << tex(out);
}

TEST(YoungProject, UnsymmetricTensorIsAnError) {
  auto s = riemann_session();
  EXPECT_THROW(young_project(parse("T_{a b}"), s.registry()), Error);
}

TEST(Canonicalise, AntisymmetricSelfContractionVanishes) {
  auto s = session_with({"{a,b,c,d}::Indices(vector).", "F_{a b}::AntiSymmetric.", "S_{a b}::Symmetric."});
  EXPECT_TRUE(canonicalise(parse("F_{a b} S_{a b}"), s.registry()).is_zero());
  EXPECT_EQ(tex(canonicalise(parse("F_{b a}"), s.registry())), "-F_{a b}");
  EXPECT_EQ(tex(canonicalise(parse("S_{b a} F_{d c}"), s.registry())), "-F_{c d} S_{a b}");
}

TEST(Canonicalise, RiemannContractionsMerge) {
  auto s = riemann_session();
  const auto e = canonicalise(parse("R_{a b c d} R_{c d a b} - R_{m n p q} R_{m n p q}"), s.registry());
  EXPECT_TRUE(collect_terms(e).is_zero());
}

TEST(Canonicalise, WeylTraceVanishes) {
  auto s = session_with({"{a,b,c,d}::Indices(vector).", "W_{a b c d}::WeylTensor."});
  EXPECT_TRUE(canonicalise(parse("W_{a b a c} X_{b c}"), s.registry()).is_zero());
}

TEST(Canonicalise, NestedSumIsLeftInPlace) {
  auto s = session_with({"{a,b}::Indices(vector).", "g_{a b}::Symmetric."});
  const auto e = canonicalise(parse("(B_{b a} - B_{a b}) g_{b a}"), s.registry());
  EXPECT_EQ(index_names(e, s.registry()).size(), 2u);
  EXPECT_NE(tex(e).find("B_{"), std::string::npos);
  EXPECT_EQ(tex(e).find("B_{a a}"), std::string::npos);
}

TEST(Indexsort, OnlyMonoTermMoves) {
  auto s = riemann_session();
  EXPECT_EQ(tex(indexsort(parse("R_{b a d c}"), s.registry())), "R_{a b c d}");
  EXPECT_EQ(tex(indexsort(parse("R_{b a c d}"), s.registry())), "-R_{a b c d}");
}

TEST(Asym, TwoSlotsGiveHalfDifference) {
  auto s = session_with({"{a,b}::Indices(vector)."});
  const auto e = asym(parse("A_{a} B_{b}"), {{"a", std::nullopt}, {"b", std::nullopt}}, s.registry());
  EXPECT_EQ(tex(e), "1/2 A_{a} B_{b} - 1/2 A_{b} B_{a}");
}

TEST(AllContractions, QuadraticRiemannScalars) {
  auto s = riemann_session();
  const auto l = all_contractions(parse("R_{a b c d} R_{e f m n}"), s.registry());
  EXPECT_EQ(l.size(), 3u);
  for (const auto& x : l) EXPECT_TRUE(classify_indices(x, s.registry()).free.empty());
}

TEST(Decompose, SquareIsTwiceTheOtherContraction) {
  auto s = riemann_session();
  const auto basis = build_basis({parse("R_{a b c d} R_{a c b d}")}, s.registry());
  EXPECT_EQ(basis.rank, 1u);
  const auto c = decompose(parse("R_{a b c d} R_{a b c d}"), basis, s.registry());
  EXPECT_EQ(c, (CoefficientVector{Rational(2)}));
  EXPECT_THROW(decompose(parse("R_{a b c d} R_{e f m n} R_{a b c d} R_{e f m n}"), basis, s.registry()), Error);
}

TEST(Decompose, DependentBasisCarriesCertificate) {
  auto s = riemann_session();
  try {
    build_basis({parse("R_{a b c d} R_{a c b d}"), parse("R_{a b c d} R_{a b c d}")}, s.registry());
    FAIL() << "expected a dependent basis";
  } catch (const BasisDependent& e) {
    ASSERT_EQ(e.certificate().size(), 2u);
    EXPECT_EQ(e.certificate()[0] + e.certificate()[1] * 2, Rational(0));
  }
}

TEST(ReduceSum, MinimalForm) {
  auto s = riemann_session();
  const auto e = reduce_sum(parse("2 R_{a b c d} + 2 R_{b c a d} + R_{c a b d}"), s.registry());
  const auto want = parse("R_{a b c d} + R_{b c a d}");
  EXPECT_TRUE(equal_subtree(e, want, true)) << tex(e);
}

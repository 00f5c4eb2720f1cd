#include "support.hpp"

#include "tensorpad/algorithms.hpp"

#include <gtest/gtest.h>

using namespace tensorpad;
using tptest::session_with;
using tptest::tex;

namespace {
Session basic() {
  return session_with({"{m,n,p,q#}::Indices(vector).", "\\partial{#}::PartialDerivative."});
}
RuleSet rules(const char* text, const PropertyRegistry& reg) { return RuleSet::from_expression(parse(text), reg); }
}  // namespace

TEST(RuleSet, AcceptsListsAndRejectsIndexMismatch) {
  auto s = basic();
  EXPECT_EQ(rules("{A -> B, C = D}", s.registry()).rules.size(), 2u);
  EXPECT_THROW(rules("A_{m} -> B_{n}", s.registry()), Error);
  EXPECT_NO_THROW(rules("A_{m} -> 0", s.registry()));
  EXPECT_THROW(rules("A_{m} + B_{m}", s.registry()), Error);
}

TEST(Substitute, ScalarIntoSquare) {
  auto s = basic();
  const auto r = substitute(parse("A A"), rules("A = B_{m n} B_{m n}", s.registry()), s.registry());
  EXPECT_TRUE(r.applied);
  EXPECT_EQ(tex(r.expression), "B_{m n} B_{m n} B_{p q1} B_{p q1}");
}

TEST(Substitute, PositionalBindingRespectsPosition) {
  auto s = basic();
  const auto rs = rules("B_{n p} = T_{m n} T_{m p}", s.registry());
  EXPECT_EQ(tex(substitute(parse("B_{q1 q2}"), rs, s.registry()).expression), "T_{m q1} T_{m q2}");
  EXPECT_FALSE(substitute(parse("B^{q1 q2}"), rs, s.registry()).applied);
}

TEST(Substitute, SymmetricTargetCarriesSign) {
  auto s = session_with({"{m,n,p}::Indices(vector).", "F_{m n}::AntiSymmetric."});
  const auto r = substitute(parse("F_{n m} X_{m n}"), rules("F_{m n} -> G_{m n}", s.registry()), s.registry());
  EXPECT_TRUE(r.applied);
  EXPECT_EQ(tex(r.expression), "G_{n m} X_{m n}");
}

TEST(Substitute, TraceMatchesNonInjectively) {
  auto s = session_with({"{m,n,p,q}::Indices(vector).", "R_{m n p q}::RiemannTensor."});
  const auto r = substitute(parse("R_{m n m n}"), rules("R_{m n m p} -> R_{n p}", s.registry()), s.registry());
  EXPECT_EQ(tex(r.expression), "R_{n n}");
}

TEST(Distribute, KeepsFactorOrder) {
  EXPECT_EQ(tex(distribute(parse("A (B + C) D"))), "A B D + A C D");
  EXPECT_EQ(tex(distribute(parse("(a + b) (c - d)"))), "a c - a d + b c - b d");
}

TEST(Prodrule, Leibniz) {
  auto s = basic();
  EXPECT_EQ(tex(prodrule(parse("\\partial_{m}(A B)"), s.registry())),
            "\\partial_{m}(A) B + A \\partial_{m}(B)");
}

TEST(Prodrule, ConstantsStayOutside) {
  auto s = session_with({"\\partial{#}::PartialDerivative.", "A::Depends(\\partial).", "c::Depends(x)."});
  EXPECT_EQ(tex(prodrule(parse("\\partial(A c)"), s.registry())), "\\partial(A) c");
}

TEST(Pintegrate, MovesDerivativeAcross) {
  auto s = basic();
  const auto e = pintegrate(parse("\\int d^nx A \\partial_{m}(B)"), "\\partial", s.registry());
  EXPECT_EQ(tex(e), "-\\int d^nx \\partial_{m}(A) B");
}

TEST(Pintegrate, TotalDerivativeVanishes) {
  auto s = basic();
  EXPECT_TRUE(pintegrate(parse("\\int d^nx \\partial_{m}(B_{m})"), "\\partial", s.registry()).is_zero());
}

TEST(Vary, ProductAndDerivative) {
  auto s = basic();
  const auto rs = rules("A -> \\delta{A}", s.registry());
  EXPECT_EQ(tex(vary(parse("A A B"), rs, s.registry())), "\\delta{A} A B + A \\delta{A} B");
  EXPECT_EQ(tex(vary(parse("\\partial_{m}(A) C"), rs, s.registry())), "\\partial_{m}(\\delta{A}) C");
  EXPECT_TRUE(vary(parse("B C"), rs, s.registry()).is_zero());
}

TEST(CollectTerms, MergesAndCancels) {
  EXPECT_EQ(tex(collect_terms(parse("1/2 a + b + 1/2 a"))), "a + b");
  EXPECT_TRUE(collect_terms(parse("A_{m} - A_{m}")).is_zero());
  EXPECT_EQ(tex(collect_terms(parse("A_{m} + A^{m}"))), "A_{m} + A^{m}");
}

TEST(Prodsort, AnticommutingSwapFlipsSign) {
  auto s = session_with({"{\\chi,\\psi}::AntiCommuting.", "{\\chi,\\psi}::SortOrder."});
  EXPECT_EQ(tex(prodsort(parse("\\psi \\chi"), s.registry())), "-\\chi \\psi");
  EXPECT_EQ(tex(prodsort(parse("B A"), s.registry())), "A B");
}

TEST(Prodsort, NonCommutingFactorsStay) {
  auto s = session_with({"{X, Y}::NonCommuting."});
  EXPECT_EQ(tex(prodsort(parse("Y X"), s.registry())), "Y X");
}

TEST(ListSum, ElementwiseAndFold) {
  auto s = basic();
  EXPECT_EQ(tex(list_sum(parse("{1, 2} + {3, -2}"), s.registry())), "{4, 0}");
  EXPECT_EQ(tex(list_sum(parse("{a, b, a}"), s.registry())), "a + b + a");
  EXPECT_EQ(tex(collect_terms(list_sum(parse("{a, b, a}"), s.registry()))), "2 a + b");
}

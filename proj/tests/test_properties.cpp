#include "support.hpp"

#include <gtest/gtest.h>

using namespace tensorpad;
using tptest::session_with;

TEST(Properties, KindNamesRoundTrip) {
  for (const char* n : {"Indices", "RiemannTensor", "WeylTensor", "SortOrder", "DiracBar", "NonIndex"}) {
    const auto k = property_kind_from_name(n);
    ASSERT_TRUE(k.has_value()) << n;
    EXPECT_EQ(property_kind_name(*k), n);
  }
  EXPECT_FALSE(property_kind_from_name("Bogus").has_value());
}

TEST(Properties, FamilyPatternMatchesGeneratedNames) {
  const Pattern p(parse("q#"));
  EXPECT_TRUE(p.is_family());
  EXPECT_EQ(p.stem(), "q");
  EXPECT_TRUE(p.matches_name("q12"));
  EXPECT_TRUE(p.matches_name("q"));
  EXPECT_FALSE(p.matches_name("qa"));
  EXPECT_FALSE(p.matches_name("p"));
}

TEST(Properties, IndexSetsAndOrdering) {
  auto s = session_with({"{m,n,p,q#}::Indices(vector).", "{\\mu,\\nu}::Indices(curved)."});
  const auto& reg = s.registry();
  const IndexSet* v = reg.index_set_of("q7");
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->name, "vector");
  EXPECT_EQ(v->generator, "q");
  EXPECT_EQ(reg.index_set_of("\\nu")->name, "curved");
  EXPECT_EQ(reg.index_set_of("z"), nullptr);
  EXPECT_LT(v->position_of("p"), v->position_of("q1"));
  EXPECT_LT(v->position_of("q2"), v->position_of("q10"));
  EXPECT_EQ(fresh_dummy(*v, {"m", "n"}), "p");
  EXPECT_EQ(fresh_dummy(*v, {"m", "n", "p", "q1"}), "q2");
}

TEST(Properties, IntegerRangeGivesDimension) {
  auto s = session_with({"{a,b,c}::Indices(vector).", "{a,b,c}::Integer(0..9)."});
  EXPECT_EQ(s.registry().index_set_of("a")->dimension, 10);
}

TEST(Properties, RiemannPresetCarriesTableau) {
  auto s = session_with({"R_{m n p q}::RiemannTensor.", "W_{m n p q}::WeylTensor."});
  const auto& reg = s.registry();
  const auto* r = reg.query(parse("R_{a b c d}"), PropertyKind::RiemannTensor);
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->tableau, YoungTableau::riemann());
  EXPECT_FALSE(r->traceless);
  EXPECT_TRUE(reg.query(parse("W_{a b c d}"), PropertyKind::WeylTensor)->traceless);
  EXPECT_EQ(tableau_of(reg, parse("R_{a b c d}"), 4), YoungTableau::riemann());
}

TEST(Properties, SymmetricAndAntiSymmetricConflict) {
  Session s;
  s.eval_line("F_{a b}::AntiSymmetric.");
  EXPECT_THROW(s.eval_line("F_{a b}::Symmetric."), Error);
  EXPECT_TRUE(s.registry().has(parse("F_{c d}"), PropertyKind::AntiSymmetric));
}

TEST(Properties, AccentInheritsFromArgument) {
  auto s = session_with({"\\delta{#}::Accent.", "\\psi::AntiCommuting.", "\\psi::SelfAntiCommuting."});
  EXPECT_TRUE(s.registry().has(parse("\\delta{\\psi}"), PropertyKind::AntiCommuting));
  EXPECT_FALSE(s.registry().has_direct(parse("\\delta{\\psi}"), PropertyKind::AntiCommuting));
}

TEST(Properties, DependsMakesOtherFactorsConstant) {
  auto s = session_with({"\\partial{#}::PartialDerivative.", "A_{a}::Depends(\\partial)."});
  const auto& reg = s.registry();
  EXPECT_FALSE(reg.is_constant_under(parse("A_{b}"), "\\partial"));
  EXPECT_TRUE(reg.is_derivative(parse("\\partial_{a}{A_{b}}")));
  EXPECT_FALSE(reg.is_inheriting(parse("\\partial_{a}{A_{b}}")));
}

TEST(Properties, CommutationSigns) {
  auto s = session_with({"{\\epsilon,\\lambda}::AntiCommuting.", "\\lambda::SelfAntiCommuting.",
                         "\\gamma_{#}::GammaMatrix.", "{\\epsilon,\\lambda}::Spinor(dimension=4)."});
  const auto& reg = s.registry();
  EXPECT_EQ(commutation_sign(reg, parse("\\epsilon"), parse("\\lambda")), -1);
  EXPECT_EQ(commutation_sign(reg, parse("\\lambda"), parse("\\lambda")), -1);
  EXPECT_EQ(commutation_sign(reg, parse("\\epsilon"), parse("\\epsilon")), 1);
  EXPECT_EQ(commutation_sign(reg, parse("A"), parse("B")), 1);
  EXPECT_FALSE(commutation_sign(reg, parse("\\gamma_{a}"), parse("\\gamma_{b}")).has_value());
  EXPECT_FALSE(commutation_sign(reg, parse("\\gamma_{a}"), parse("\\epsilon")).has_value());
}

TEST(Properties, UnknownPropertyIsAnError) {
  Session s;
  EXPECT_THROW(s.eval_line("A::Frobnicate."), Error);
}

#include "support.hpp"

#include <gtest/gtest.h>

using namespace tensorpad;
using tptest::session_with;
using tptest::tex;

namespace {
Session vector_session() { return session_with({"{m,n,p,q#}::Indices(vector).", "\\partial{#}::Derivative."}); }
}

TEST(Indices, ClassifyFreeAndDummy) {
  auto s = vector_session();
  const auto c = classify_indices(parse("A_{m n} B_{n p}"), s.registry());
  EXPECT_EQ(c.free_names(), (std::vector<std::string>{"m", "p"}));
  EXPECT_EQ(c.dummy_names(), (std::vector<std::string>{"n"}));
}

TEST(Indices, NestedSumCountsOnce) {
  auto s = vector_session();
  const auto c = classify_indices(parse("(A_{m} + B_{m}) C_{m}"), s.registry());
  EXPECT_TRUE(c.free_names().empty());
  EXPECT_EQ(c.dummy_names(), (std::vector<std::string>{"m"}));
}

TEST(Indices, TripleOccurrenceIsAnError) {
  auto s = vector_session();
  EXPECT_THROW(classify_indices(parse("A_{m} B_{m} C_{m}"), s.registry()), Error);
}

TEST(Indices, RenameDummiesUsesFirstOccurrence) {
  auto s = vector_session();
  EXPECT_EQ(tex(rename_dummies(parse("A_{q3 p} B_{q3}"), s.registry())), "A_{m p} B_{m}");
  EXPECT_EQ(tex(rename_dummies(parse("A_{p m} B_{p}"), s.registry())), "A_{n m} B_{n}");
}

TEST(Indices, RelabelOnInsertAvoidsHostNames) {
  auto s = vector_session();
  const auto out = relabel_on_insert(parse("B_{m n} B_{m n}"), parse("B_{m n} B_{m n}"), s.registry());
  EXPECT_EQ(tex(out), "B_{p q1} B_{p q1}");
}

TEST(Indices, RenameIndicesReachesArguments) {
  auto s = vector_session();
  Expression e = parse("\\partial_{m}{A_{n}}");
  rename_indices(e, {{"m", "p"}, {"n", "q1"}}, s.registry());
  EXPECT_EQ(tex(e), "\\partial_{p}{A_{q1}}");
}

TEST(Indices, OrdinalPutsUndeclaredLast) {
  auto s = vector_session();
  EXPECT_LT(index_ordinal("q4", s.registry()), index_ordinal("z", s.registry()));
  EXPECT_LT(index_ordinal("m", s.registry()), index_ordinal("n", s.registry()));
}

TEST(Indices, IndexNamesSeesEverything) {
  auto s = vector_session();
  const auto names = index_names(parse("\\partial_{m}(A_{n} + B_{n}) C_{p}"), s.registry());
  EXPECT_EQ(names, (std::set<std::string>{"m", "n", "p"}));
}

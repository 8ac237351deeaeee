#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fedsel/cori.hpp"
#include "fedsel/error.hpp"
#include "support/cori_oracle.hpp"
#include "support/generators.hpp"
#include "support/table_matrix.hpp"

using namespace fedsel;

namespace {

DfMatrix two_db() {
  return DfMatrix({{"DB1", 10}, {"DB2", 20}}, {{"educ", {{"DB1", 5}, {"DB2", 9}}}});
}

}  // namespace

// Reference values computed with arbitrary-precision arithmetic.
TEST(Cori, InverseCollectionFrequencyVectors) {
  EXPECT_NEAR(*inverse_collection_frequency(2, 5), 0.5645852186, 1e-5);
  EXPECT_NEAR(*inverse_collection_frequency(5, 5), 0.0531936242, 1e-5);
  EXPECT_NEAR(*inverse_collection_frequency(1, 1), std::log(1.5) / std::log(2.0), 1e-12);
  EXPECT_FALSE(inverse_collection_frequency(0, 5).has_value());
}

TEST(Cori, BeliefVectors) {
  const CoriParams p;
  EXPECT_NEAR(weighted_df(3, 10, 0.4), 0.7134656420, 1e-4);
  EXPECT_NEAR(*term_belief(3, 10, 2, 5, p), 0.6416872933, 1e-4);
  EXPECT_NEAR(weighted_df(10, 10, 0.4), 0.9883597880, 1e-4);
  EXPECT_NEAR(*term_belief(10, 10, 2, 5, p), 0.7348079962, 1e-4);
  EXPECT_DOUBLE_EQ(*term_belief(0, 10, 2, 5, p), 0.4);
  EXPECT_DOUBLE_EQ(*term_belief(0, 10, 0, 5, p), 0.4);
  EXPECT_FALSE(term_belief(0, 0, 2, 5, p).has_value());
}

TEST(Cori, FormulaWithZeroDfPolicy) {
  CoriParams p;
  p.missing_term_policy = MissingTermPolicy::formula_with_zero_df;
  const double expected = 0.4 + 0.6 * weighted_df(0, 10, 0.4) * *inverse_collection_frequency(2, 5);
  EXPECT_DOUBLE_EQ(*term_belief(0, 10, 2, 5, p), expected);
  // A term seen nowhere still carries no evidence.
  EXPECT_DOUBLE_EQ(*term_belief(0, 10, 0, 5, p), 0.4);
}

TEST(Cori, PolicyNames) {
  for (auto policy : {MissingTermPolicy::default_belief, MissingTermPolicy::formula_with_zero_df}) {
    EXPECT_EQ(parse_missing_term_policy(to_string(policy)), policy);
  }
  EXPECT_FALSE(parse_missing_term_policy("bogus"));
}

TEST(Cori, ParamsValidate) {
  EXPECT_NO_THROW(CoriParams{}.validate());
  EXPECT_THROW((CoriParams{1.0, 0.4}).validate(), Error);
  EXPECT_THROW((CoriParams{0.4, -0.1}).validate(), Error);
  EXPECT_THROW((CoriParams{std::nan(""), 0.4}).validate(), Error);
}

TEST(DfMatrix, DerivesCfAndDfMax) {
  const auto m = two_db();
  EXPECT_EQ(m.df("educ", "DB1"), 5u);
  EXPECT_EQ(m.df("educ", "DB2"), 9u);
  EXPECT_EQ(m.cf("educ"), 2u);
  EXPECT_EQ(m.cf("nothing"), 0u);
  EXPECT_EQ(m.df_max("DB2"), 9u);
  EXPECT_EQ(m.collections(), (std::vector<std::string>{"DB1", "DB2"}));
  EXPECT_THROW(m.df_max("DB3"), Error);
}

TEST(DfMatrix, RejectsBadCells) {
  EXPECT_THROW(DfMatrix({{"A", 3}}, {{"t", {{"A", 0}}}}), Error);
  EXPECT_THROW(DfMatrix({{"A", 3}}, {{"t", {{"B", 1}}}}), Error);
  EXPECT_THROW(DfMatrix({{"A", 3}}, {{"t", {{"A", 4}}}}), Error);
}

TEST(DfMatrix, BuildFromCollections) {
  CollectionSet set;
  auto& a = set.create("DB1");
  auto& b = set.create("DB2");
  set.create("DB3");  // empty
  for (int i = 0; i < 5; ++i) a.add({"a" + std::to_string(i), {{"educ", 1}}});
  for (int i = 0; i < 9; ++i) b.add({"b" + std::to_string(i), {{"educ", 2}, {"x", 1}}});
  const auto m = build_df_matrix(set);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.df("educ", "DB1"), 5u);
  EXPECT_EQ(m.df("educ", "DB2"), 9u);
  EXPECT_EQ(m.cf("educ"), 2u);
  EXPECT_EQ(m.df_max("DB3"), 0u);
  EXPECT_EQ(m.record_count("DB2"), 9u);

  CollectionSet none;
  try {
    build_df_matrix(none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_state);
  }
}

TEST(ScoreQuery, SingleTermFollowsDf) {
  // Equal df_max everywhere so only df varies.
  const DfMatrix m({{"A", 20}, {"B", 20}, {"C", 20}},
                   {{"t", {{"A", 2}, {"B", 7}, {"C", 4}}}, {"pad", {{"A", 10}, {"B", 10}, {"C", 10}}}});
  const auto s = score_query({"t"}, m, {});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].collection, "B");
  EXPECT_EQ(s[1].collection, "C");
  EXPECT_EQ(s[2].collection, "A");
}

TEST(ScoreQuery, AbsentTermsTieAtDefaultBelief) {
  const auto m = two_db();
  const auto s = score_query({"zzzqx"}, m, {});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].collection, "DB1");
  EXPECT_EQ(s[1].collection, "DB2");
  for (const auto& b : s) EXPECT_DOUBLE_EQ(b.belief, 0.4);
}

TEST(ScoreQuery, EmptyCollectionGoesLast) {
  const DfMatrix m({{"A", 5}, {"B", 0}, {"Z", 5}}, {{"t", {{"A", 1}, {"Z", 2}}}});
  const auto s = score_query({"zzz"}, m, {});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].collection, "A");
  EXPECT_EQ(s[1].collection, "Z");
  EXPECT_EQ(s[2].collection, "B");
  EXPECT_TRUE(s[2].excluded);
  EXPECT_DOUBLE_EQ(s[2].belief, 0.4);
}

TEST(ScoreQuery, EmptyTermsRejected) {
  EXPECT_THROW(score_query({}, two_db(), {}), Error);
}

TEST(ScoreQuery, ThreeByFourMatchesOracle) {
  oracle::Table t{{"ta", "tb", "tc"},
                  {"C0", "C1", "C2", "C3"},
                  {{3, 0, 7, 1}, {0, 0, 0, 0}, {12, 5, 0, 20}}};
  const auto lib = score_query({"ta", "tb", "tc"}, test::to_matrix(t), {});
  const auto ref = test::sorted(oracle::score(t, {0, 1, 2}));
  ASSERT_EQ(lib.size(), ref.size());
  for (std::size_t i = 0; i < lib.size(); ++i) {
    EXPECT_EQ(lib[i].collection, ref[i].collection);
    EXPECT_NEAR(lib[i].belief, static_cast<double>(ref[i].belief), 1e-9);
  }
}

// --- properties ---------------------------------------------------------

TEST(CoriProperty, OracleEquivalence) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 300; ++round) {
    const auto t = gen::df_table(rng, 10, 5, 20);
    std::vector<std::size_t> rows;
    TermSet terms;
    for (std::size_t i = 0; i < t.terms.size(); ++i) {
      if (rows.empty() || gen::below(rng, 2) == 0) {
        rows.push_back(i);
        terms.insert(t.terms[i]);
      }
    }
    const auto lib = score_query(terms, test::to_matrix(t), {});
    const auto ref = oracle::score(t, rows);
    ASSERT_EQ(lib.size(), ref.size());
    for (const auto& r : ref) {
      const auto it = std::find_if(lib.begin(), lib.end(),
                                   [&](const BeliefScore& b) { return b.collection == r.collection; });
      ASSERT_NE(it, lib.end());
      ASSERT_NEAR(it->belief, static_cast<double>(r.belief), 1e-9);
      ASSERT_EQ(it->excluded, r.excluded);
    }
  }
}

TEST(CoriProperty, MonotoneInDf) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 500; ++round) {
    const auto df_max = static_cast<std::uint32_t>(gen::between(rng, 2, 500));
    const auto m = gen::between(rng, 1, 50);
    const auto cf = static_cast<std::uint32_t>(gen::between(rng, 1, m));
    CoriParams p{gen::uniform(rng, 0.0, 0.95), gen::uniform(rng, 0.0, 0.95)};
    double prev = *term_belief(1, df_max, cf, m, p);
    for (std::uint32_t df = 2; df <= df_max; ++df) {
      const double cur = *term_belief(df, df_max, cf, m, p);
      ASSERT_GT(cur, prev) << df << "/" << df_max;
      prev = cur;
    }
  }
}

TEST(CoriProperty, DecreasingInCf) {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 500; ++round) {
    const auto df_max = static_cast<std::uint32_t>(gen::between(rng, 1, 500));
    const auto df = static_cast<std::uint32_t>(gen::between(rng, 1, df_max));
    const auto m = gen::between(rng, 2, 60);
    CoriParams p{gen::uniform(rng, 0.0, 0.95), gen::uniform(rng, 0.0, 0.95)};
    double prev = *term_belief(df, df_max, 1, m, p);
    for (std::uint32_t cf = 2; cf <= m; ++cf) {
      const double cur = *term_belief(df, df_max, cf, m, p);
      ASSERT_LT(cur, prev);
      prev = cur;
    }
  }
}

TEST(CoriProperty, LogBaseInvariance) {
  std::mt19937_64 rng(10);
  for (int round = 0; round < 2000; ++round) {
    const auto df_max = static_cast<std::uint32_t>(gen::between(rng, 1, 1000));
    const auto df = static_cast<std::uint32_t>(gen::between(rng, 0, df_max));
    const auto m = gen::between(rng, 1, 100);
    const auto cf = static_cast<std::uint32_t>(gen::between(rng, 1, m));
    const double dt = gen::uniform(rng, 0.0, 0.99);
    ASSERT_NEAR(*inverse_collection_frequency(cf, m, LogBase::natural),
                *inverse_collection_frequency(cf, m, LogBase::decimal), 1e-12);
    ASSERT_NEAR(weighted_df(df, df_max, dt, LogBase::natural),
                weighted_df(df, df_max, dt, LogBase::decimal), 1e-12);
  }
}

TEST(CoriProperty, BeliefBounds) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 5000; ++round) {
    const auto df_max = static_cast<std::uint32_t>(gen::between(rng, 1, 1000));
    const auto df = static_cast<std::uint32_t>(gen::between(rng, 1, df_max));
    const auto m = gen::between(rng, 1, 100);
    const auto cf = static_cast<std::uint32_t>(gen::between(rng, 1, m));
    CoriParams p{gen::uniform(rng, 0.0, 0.99), gen::uniform(rng, 0.0, 0.99)};
    const double b = *term_belief(df, df_max, cf, m, p);
    ASSERT_GT(b, p.d_b);
    ASSERT_LT(b, 1.0);
  }
}

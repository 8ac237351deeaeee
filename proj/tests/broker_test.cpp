#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <thread>

#include "fedsel/activity_log.hpp"
#include "fedsel/broker.hpp"
#include "fedsel/deployment.hpp"
#include "fedsel/error.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace fedsel;

namespace {

class BrokerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    sources_ = test::write_small_corpora(tmp_.path());
    deployment_ = build_deployment(sources_);
  }

  Broker broker(ActivityLog* log = nullptr) const {
    return Broker(deployment_->collections, deployment_->directory, log);
  }

  ErrorCode failure(const QueryRequest& r, ActivityLog* log = nullptr) const {
    try {
      broker(log).handle_query(r);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error for '" << r.text << "'";
    return ErrorCode::invalid_state;
  }

  test::TempDir tmp_;
  std::vector<CollectionSource> sources_;
  std::shared_ptr<const Deployment> deployment_;
};

RankedCollection ranked(std::string name, double belief, std::size_t rank) {
  return {std::move(name), belief, 0.0, rank};
}

SearchHit hit(std::string url, std::uint64_t score) { return {std::move(url), {"t"}, score}; }

}  // namespace

TEST(AnalyzeQuery, StemsAndConflates) {
  EXPECT_EQ(analyze_query("connected connection"), (TermSet{"connect"}));
  EXPECT_EQ(analyze_query("The Education of teachers"), (TermSet{"educ", "teacher"}));
  EXPECT_TRUE(analyze_query("the of and").empty());
}

TEST(MergeResults, SingleCollectionIsIdentity) {
  const std::vector<RankedCollection> sel{ranked("A", 0.6, 1)};
  const std::vector<CollectionHits> in{{"A", {hit("u3", 9), hit("u1", 4), hit("u2", 4)}}};
  const auto out = merge_results(in, sel);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].hit.url, "u3");
  EXPECT_EQ(out[1].hit.url, "u1");
  EXPECT_EQ(out[2].hit.url, "u2");
}

TEST(MergeResults, EqualScoresOrderByBelief) {
  const std::vector<RankedCollection> sel{ranked("DB2", 0.5, 2), ranked("DB1", 0.7, 1)};
  const std::vector<CollectionHits> in{{"DB2", {hit("A", 5)}}, {"DB1", {hit("B", 5)}}};
  const auto out = merge_results(in, sel);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].source, "DB1");
  EXPECT_EQ(out[0].hit.url, "B");
  EXPECT_EQ(out[1].source, "DB2");
}

TEST(MergeResults, DuplicateUrlKeepsHigherScore) {
  const std::vector<RankedCollection> sel{ranked("DB1", 0.7, 1), ranked("DB2", 0.5, 2)};
  const std::vector<CollectionHits> in{{"DB1", {hit("same", 2), hit("other", 1)}},
                                       {"DB2", {hit("same", 4)}}};
  const auto out = merge_results(in, sel);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].hit.url, "same");
  EXPECT_EQ(out[0].hit.score, 4u);
  EXPECT_EQ(out[0].source, "DB2");
}

TEST(MergeResults, ArrivalOrderDoesNotMatter) {
  const std::vector<RankedCollection> sel{ranked("X", 0.7, 1), ranked("Y", 0.5, 2), ranked("Z", 0.5, 3)};
  std::vector<CollectionHits> in{{"X", {hit("a", 3), hit("b", 1)}},
                                 {"Y", {hit("b", 3), hit("c", 3)}},
                                 {"Z", {hit("c", 3), hit("d", 2)}}};
  const auto first = merge_results(in, sel);
  std::reverse(in.begin(), in.end());
  EXPECT_EQ(merge_results(in, sel), first);
}

TEST(MergeResults, UnknownSourceRejected) {
  const std::vector<RankedCollection> sel{ranked("A", 0.6, 1)};
  const std::vector<CollectionHits> in{{"B", {hit("u", 1)}}};
  EXPECT_THROW(merge_results(in, sel), Error);
}

TEST_F(BrokerTest, RoutesTopicQueryToOwner) {
  QueryRequest r{"education"};
  const auto resp = broker().handle_query(r);
  ASSERT_EQ(resp.selected.size(), 1u);
  EXPECT_EQ(resp.selected[0].collection, "edu");
  EXPECT_FALSE(resp.selection_bypassed);
  ASSERT_FALSE(resp.hits.empty());
  EXPECT_LE(resp.hits.size(), 10u);
  for (const auto& h : resp.hits) EXPECT_EQ(h.source, "edu");

  // Exhaustive search over every collection agrees on the top hit.
  QueryRequest all{"education"};
  all.constraints.num_databases = 3;
  all.constraints.max_results = 1000;
  const auto exhaustive = broker().handle_query(all);
  EXPECT_EQ(exhaustive.hits.front(), resp.hits.front());
  std::set<std::string> sources;
  for (const auto& h : exhaustive.hits) sources.insert(h.source);
  EXPECT_EQ(sources, (std::set<std::string>{"edu", "mix"}));
}

TEST_F(BrokerTest, FrequencyReportCoversEveryCollection) {
  const auto resp = broker().handle_query({"education"});
  ASSERT_EQ(resp.frequency.size(), 3u);
  EXPECT_EQ(resp.frequency[0], (CollectionFrequency{"edu", 12}));
  EXPECT_EQ(resp.frequency[1], (CollectionFrequency{"mix", 2}));
  EXPECT_EQ(resp.frequency[2], (CollectionFrequency{"med", 0}));
}

TEST_F(BrokerTest, AbsentTermGivesNoHits) {
  const auto resp = broker().handle_query({"zzzqx"});
  ASSERT_EQ(resp.selected.size(), 1u);
  EXPECT_EQ(resp.selected[0].collection, "edu");  // everything ties at d_b
  EXPECT_DOUBLE_EQ(resp.selected[0].belief, 0.4);
  EXPECT_TRUE(resp.hits.empty());
}

TEST_F(BrokerTest, MaxResultsTruncates) {
  QueryRequest r{"education recipes hospital"};
  r.constraints.num_databases = 3;
  r.constraints.max_results = 4;
  const auto resp = broker().handle_query(r);
  EXPECT_EQ(resp.hits.size(), 4u);
  std::set<std::string> selected;
  for (const auto& s : resp.selected) selected.insert(s.collection);
  for (const auto& h : resp.hits) EXPECT_TRUE(selected.contains(h.source));
}

TEST_F(BrokerTest, AllCollectionsEqualsExhaustive) {
  QueryRequest r{"education hospital recipes surgery"};
  r.constraints.num_databases = 3;
  r.constraints.max_results = 1000;
  const auto resp = broker().handle_query(r);
  std::set<std::string> urls;
  for (const auto& h : resp.hits) urls.insert(h.hit.url);
  std::set<std::string> expected;
  const auto terms = analyze_query(r.text);
  for (const auto& name : deployment_->collections.names()) {
    for (const auto& h : deployment_->collections.search(name, terms, 1000)) expected.insert(h.url);
  }
  EXPECT_EQ(urls, expected);
}

TEST_F(BrokerTest, TargetBypassesSelection) {
  ActivityLog log;
  QueryRequest r{"education"};
  r.target_db = "med";
  const auto resp = broker(&log).handle_query(r);
  EXPECT_TRUE(resp.selection_bypassed);
  ASSERT_EQ(resp.selected.size(), 1u);
  EXPECT_EQ(resp.selected[0].collection, "med");
  EXPECT_TRUE(resp.hits.empty());

  const auto records = log.records();
  ASSERT_EQ(records.size(), 1u);
  EXPECT_TRUE(records[0].selection_bypassed);
  EXPECT_EQ(records[0].selected, (std::vector<std::string>{"med"}));
}

TEST_F(BrokerTest, Errors) {
  ActivityLog log;
  EXPECT_EQ(failure({"the and of"}, &log), ErrorCode::invalid_query);
  EXPECT_EQ(failure({""}, &log), ErrorCode::invalid_query);
  QueryRequest target{"education"};
  target.target_db = "DB9";
  EXPECT_EQ(failure(target, &log), ErrorCode::not_found);
  QueryRequest filtered{"education"};
  filtered.constraints.max_price = 0.1;
  EXPECT_EQ(failure(filtered, &log), ErrorCode::no_eligible_database);
  QueryRequest bad{"education"};
  bad.constraints.num_databases = 0;
  EXPECT_EQ(failure(bad, &log), ErrorCode::invalid_argument);

  const auto records = log.records();
  ASSERT_EQ(records.size(), 5u);
  EXPECT_EQ(records[0].outcome, "invalid_query");
  EXPECT_EQ(records[2].outcome, "not_found");
  EXPECT_EQ(records[3].outcome, "no_eligible_database");
}

TEST_F(BrokerTest, RespondReportsAdvisory) {
  QueryRequest r{"education"};
  r.constraints.ttl_ms = 1;
  const auto resp = broker().respond(r);
  EXPECT_TRUE(resp.selected.empty());
  EXPECT_TRUE(resp.hits.empty());
  ASSERT_TRUE(resp.advisory.has_value());
  EXPECT_EQ(resp.frequency.size(), 3u);
}

TEST_F(BrokerTest, FormatIsStable) {
  const auto a = broker().handle_query({"education hospital"});
  const auto b = broker().handle_query({"education hospital"});
  EXPECT_EQ(format_response(a, false), format_response(b, false));
  EXPECT_EQ(format_response(a, false).find("timing_ms"), std::string::npos);
  EXPECT_NE(format_response(a).find("timing_ms"), std::string::npos);
}

TEST_F(BrokerTest, ConcurrentQueriesAgree) {
  const auto expected = format_response(broker().handle_query({"education recipes"}), false);
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        QueryRequest r{"education recipes"};
        if (format_response(broker().handle_query(r), false) != expected) ++mismatches;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
}

// --- activity log ----------------------------------------------------------

TEST(ActivityLog, EmptySummary) {
  const auto s = report({});
  EXPECT_EQ(s, ActivitySummary{});
}

TEST_F(BrokerTest, LogRecordsQueriesInOrderAndReplays) {
  const auto file = tmp_.path() / "activity.jsonl";
  {
    ActivityLog log(file);
    auto b = broker(&log);
    b.handle_query({"education"});
    b.handle_query({"hospital surgery"});
    QueryRequest t{"recipes"};
    t.target_db = "mix";
    b.handle_query(t);
    const auto records = log.records();
    ASSERT_EQ(records.size(), 3u);
    EXPECT_EQ(records[0].sequence, 1u);
    EXPECT_EQ(records[1].query, "hospital surgery");
    EXPECT_EQ(records[1].terms, (std::vector<std::string>{"hospit", "surgeri"}));
    EXPECT_EQ(records[2].sequence, 3u);
  }
  const auto replayed = read_activity_log(file);
  ASSERT_EQ(replayed.size(), 3u);
  const auto summary = report(replayed);
  EXPECT_EQ(summary.queries, 3u);
  EXPECT_EQ(summary.total_terms, 4u);
  EXPECT_EQ(summary.bypassed, 1u);
  EXPECT_EQ(summary.total_collections_selected, 3u);

  // Reopening continues the sequence and keeps earlier records.
  ActivityLog reopened(file);
  EXPECT_EQ(reopened.size(), 3u);
  EXPECT_EQ(reopened.append({.query = "more"}), 4u);
  EXPECT_EQ(report(read_activity_log(file)).queries, 4u);
  EXPECT_EQ(report(reopened.records()), report(read_activity_log(file)));
}

TEST(ActivityLog, RecordRoundTrip) {
  ActivityRecord r{7, "a \"quoted\" query", {"a", "b"}, {"DB1"}, 3, true, "ok"};
  EXPECT_EQ(parse_activity_record(format_activity_record(r)), r);
  EXPECT_THROW(parse_activity_record("{not json"), Error);
}

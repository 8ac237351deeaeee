#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "fedsel/corpus.hpp"
#include "fedsel/experiment.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

namespace cli = fedsel::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    sources_ = test::write_small_corpora(tmp_.path());
    session_ = (tmp_.path() / "session.json").string();
  }

  Result run(std::vector<std::string> args) const {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }

  std::string p(const std::string& name) const { return (tmp_.path() / name).string(); }

  std::string configure_all(const std::string& index_name = "dir.idx") {
    for (const auto& s : sources_) {
      const auto r = run({"ingest", "--collection", s.name, "--corpus", s.corpus.string(), "--latency",
                          std::to_string(s.profile.est_latency_ms), "--price",
                          std::to_string(s.profile.price), "--session", session_});
      EXPECT_EQ(r.code, cli::kOk) << r.err;
    }
    const auto r = run({"configure", "--out", p(index_name), "--session", session_});
    EXPECT_EQ(r.code, cli::kOk) << r.err;
    return p(index_name);
  }

  test::TempDir tmp_;
  std::vector<fedsel::CollectionSource> sources_;
  std::string session_;
};

}  // namespace

TEST_F(CliTest, IngestPrintsCount) {
  const auto r = run({"ingest", "--collection", "edu", "--corpus", sources_[0].corpus.string(),
                      "--session", session_});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out, "12 documents\n");
}

TEST_F(CliTest, IngestErrors) {
  auto r = run({"ingest", "--collection", "x", "--corpus", p("missing.jsonl"), "--session", session_});
  EXPECT_EQ(r.code, cli::kIoError);

  std::ofstream(p("dup.jsonl")) << R"({"url":"http://a","body":"one"})" << "\n"
                                << R"({"url":"http://a","body":"two"})" << "\n";
  r = run({"ingest", "--collection", "x", "--corpus", p("dup.jsonl"), "--session", session_});
  EXPECT_EQ(r.code, cli::kDuplicate);
  EXPECT_NE(r.err.find("http://a"), std::string::npos) << r.err;

  std::ofstream(p("bad.jsonl")) << R"({"url":"http://a","body":"one"})" << "\n{oops\n";
  r = run({"ingest", "--collection", "x", "--corpus", p("bad.jsonl"), "--session", session_});
  EXPECT_NE(r.code, cli::kOk);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;

  r = run({"ingest", "--collection", "x"});
  EXPECT_EQ(r.code, cli::kUsage);
}

TEST_F(CliTest, ConfigureIsDeterministic) {
  const auto a = configure_all("a.idx");
  const auto r = run({"configure", "--out", p("b.idx"), "--session", session_});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(slurp(a), slurp(p("b.idx")));
  std::size_t c_lines = 0;
  std::istringstream in(slurp(a));
  for (std::string line; std::getline(in, line);) c_lines += line.starts_with("C\t") ? 1 : 0;
  EXPECT_EQ(c_lines, 3u);
  EXPECT_NE(r.out.find("3 collections"), std::string::npos) << r.out;
}

TEST_F(CliTest, ConfigureErrors) {
  auto r = run({"configure", "--out", p("x.idx"), "--session", p("empty-session.json")});
  EXPECT_EQ(r.code, cli::kNoCollections);
  configure_all();
  r = run({"configure", "--out", p("nowhere/x.idx"), "--session", session_});
  EXPECT_EQ(r.code, cli::kIoError);
}

TEST_F(CliTest, QueryTable) {
  const auto index = configure_all();
  const auto r = run({"query", "--index", index, "--q", "education", "--k", "1"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("selected collections:"), std::string::npos);
  EXPECT_NE(r.out.find("keyword frequency per collection:"), std::string::npos);
  for (const auto* name : {"edu", "med", "mix"}) EXPECT_NE(r.out.find(name), std::string::npos);
}

TEST_F(CliTest, QueryConflatesTerms) {
  const auto index = configure_all();
  const auto r = run({"query", "--index", index, "--q", "connected connection", "--format", "records"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto head = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_EQ(head["terms"], nlohmann::json::array({"connect"}));
}

TEST_F(CliTest, QueryRecordsMatchBroker) {
  const auto index = configure_all();
  const auto r = run({"query", "--index", index, "--q", "hospital recipes", "--k", "2", "--format", "records"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream in(r.out);
  std::size_t selected = 0, hits = 0, freq = 0;
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    selected += j["type"] == "selected";
    hits += j["type"] == "hit";
    freq += j["type"] == "frequency";
  }
  EXPECT_EQ(selected, 2u);
  EXPECT_EQ(hits, 10u);
  EXPECT_EQ(freq, 3u);
}

TEST_F(CliTest, QueryBypassAndErrors) {
  const auto index = configure_all();
  auto r = run({"query", "--index", index, "--q", "education", "--db", "med"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("bypassed"), std::string::npos);

  EXPECT_EQ(run({"query", "--index", index, "--q", ""}).code, cli::kBadQuery);
  EXPECT_EQ(run({"query", "--index", index, "--q", "the of"}).code, cli::kBadQuery);
  EXPECT_EQ(run({"query", "--index", index, "--q", "zzzqx"}).code, cli::kOk);

  std::ofstream(p("broken.idx")) << "garbage\n";
  std::filesystem::copy_file(index + ".sources", p("broken.idx.sources"));
  EXPECT_EQ(run({"query", "--index", p("broken.idx"), "--q", "education"}).code, cli::kBadIndex);
  EXPECT_EQ(run({"query", "--index", p("absent.idx"), "--q", "education"}).code, cli::kBadIndex);
}

TEST_F(CliTest, EvalAndReport) {
  const auto index = configure_all();
  std::ofstream(p("queries.txt")) << "# topics\neducation\nhospital\n\nrecipes\n";
  const auto report = p("report.json");
  auto r = run({"eval", "--index", index, "--queries", p("queries.txt"), "--baseline", "exhaustive",
                "--report", report});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto first = slurp(report);
  const auto parsed = fedsel::parse_eval_report(first);
  EXPECT_EQ(parsed.per_query.size(), 3u);
  EXPECT_DOUBLE_EQ(parsed.aggregate.reduction_factor, 3.0);

  r = run({"eval", "--index", index, "--queries", p("queries.txt"), "--baseline", "exhaustive",
           "--report", report});
  EXPECT_EQ(slurp(report), first);

  std::ofstream(p("none.txt")) << "# nothing\n";
  r = run({"eval", "--index", index, "--queries", p("none.txt"), "--baseline", "exhaustive",
           "--report", report});
  EXPECT_EQ(r.code, cli::kBadQuery);

  const auto log = p("activity.jsonl");
  run({"query", "--index", index, "--q", "education", "--log", log});
  run({"query", "--index", index, "--q", "surgery", "--log", log});
  r = run({"report", "--log", log});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out, run({"report", "--log", log}).out);
  EXPECT_NE(r.out.find("surgery"), std::string::npos);
}

TEST_F(CliTest, UnknownCommand) {
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({}).code, cli::kUsage);
}

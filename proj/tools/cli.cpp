#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedsel/activity_log.hpp"
#include "fedsel/broker.hpp"
#include "fedsel/corpus.hpp"
#include "fedsel/deployment.hpp"
#include "fedsel/directory.hpp"
#include "fedsel/error.hpp"
#include "fedsel/experiment.hpp"
#include "fedsel/http_service.hpp"

namespace fedsel::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  // ingest
  std::string collection;
  std::string corpus;
  double latency = 0.0;
  double price = 0.0;
  std::string session;
  // configure
  std::string out;
  double d_t = 0.4;
  double d_b = 0.4;
  std::string policy = "default_belief";
  // query / serve / eval
  std::string index;
  std::string q;
  std::size_t k = 1;
  std::size_t n = 10;
  std::uint64_t ttl = 0;
  double max_price = std::numeric_limits<double>::infinity();
  std::string db;
  std::string format = "table";
  std::string log;
  std::string listen = "127.0.0.1:8080";
  std::string queries;
  std::string baseline;
  std::string report = "eval_report.json";
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error:
    case ErrorCode::parse_error: return kIoError;
    case ErrorCode::duplicate_document: return kDuplicate;
    case ErrorCode::invalid_state: return kNoCollections;
    case ErrorCode::corrupt_index:
    case ErrorCode::format_version: return kBadIndex;
    case ErrorCode::invalid_query:
    case ErrorCode::not_found:
    case ErrorCode::no_eligible_database: return kBadQuery;
    case ErrorCode::invalid_argument: return kUsage;
  }
  return kUsage;
}

std::string default_session() {
  if (const char* env = std::getenv("FEDSEL_SESSION"); env && *env) return env;
  return "fedsel-session.json";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Opening an index is its own failure class: anything wrong with the index,
// its sources manifest or the corpora behind it means a bad index.
std::shared_ptr<const Deployment> open_index(const std::string& index) {
  try {
    const auto sources = read_sources(sources_path_for(index));
    return open_deployment(index, sources);
  } catch (const Error& e) {
    throw Error(ErrorCode::corrupt_index, e.what());
  }
}

int cmd_ingest(const Options& o, std::ostream& out) {
  CollectionSet scratch;
  scratch.create(o.collection);
  const auto count = load_corpus(o.corpus, scratch, o.collection);

  std::vector<CollectionSource> sources;
  if (fs::exists(o.session)) sources = read_sources(o.session);
  std::erase_if(sources, [&](const auto& s) { return s.name == o.collection; });
  sources.push_back({o.collection, fs::absolute(o.corpus), {o.latency, o.price}});
  write_sources(o.session, sources);

  out << count << " documents\n";
  return kOk;
}

int cmd_configure(const Options& o, std::ostream& out) {
  std::vector<CollectionSource> sources;
  if (fs::exists(o.session)) sources = read_sources(o.session);
  if (sources.empty()) {
    throw Error(ErrorCode::invalid_state, "no collections ingested in session '" + o.session + "'");
  }
  CoriParams params{o.d_t, o.d_b, MissingTermPolicy::default_belief};
  const auto policy = parse_missing_term_policy(o.policy);
  if (!policy) throw Error(ErrorCode::invalid_argument, "unknown policy '" + o.policy + "'");
  params.missing_term_policy = *policy;

  const auto deployment = build_deployment(sources, params);
  save_index(deployment->directory, o.out);
  write_sources(sources_path_for(o.out), sources);
  out << deployment->directory.matrix().term_count() << " terms, "
      << deployment->directory.matrix().size() << " collections\n";
  return kOk;
}

void print_table(const QueryResponse& r, std::ostream& out) {
  out << "query: " << r.query << "\n";
  out << "terms:";
  for (const auto& t : r.terms) out << ' ' << t;
  out << "\n";
  if (r.selection_bypassed) {
    out << "selection: bypassed, target " << r.selected.front().collection << "\n";
  } else {
    out << "selected collections:\n";
    out << "  rank  collection            belief    utility\n";
    for (const auto& s : r.selected) {
      out << "  " << std::left << std::setw(6) << s.rank << std::setw(22) << s.collection
          << std::setw(10) << fixed(s.belief, 5) << fixed(s.utility, 5) << "\n";
    }
  }
  if (r.advisory) out << "advisory: " << *r.advisory << "\n";
  out << "hits (" << r.hits.size() << "):\n";
  for (std::size_t i = 0; i < r.hits.size(); ++i) {
    const auto& h = r.hits[i];
    out << "  " << std::left << std::setw(4) << (i + 1) << std::setw(7) << h.hit.score
        << std::setw(12) << h.source << h.hit.url << "\n";
  }
  out << "keyword frequency per collection:\n";
  for (const auto& f : r.frequency) {
    out << "  " << std::left << std::setw(22) << f.collection << f.df << "\n";
  }
}

void print_records(const QueryResponse& r, std::ostream& out) {
  using nlohmann::ordered_json;
  ordered_json head;
  head["type"] = "query";
  head["query"] = r.query;
  head["terms"] = r.terms;
  head["selection_bypassed"] = r.selection_bypassed;
  if (r.advisory) head["advisory"] = *r.advisory;
  out << head.dump() << "\n";
  for (const auto& s : r.selected) {
    ordered_json j;
    j["type"] = "selected";
    j["collection"] = s.collection;
    j["belief"] = s.belief;
    j["utility"] = s.utility;
    j["rank"] = s.rank;
    out << j.dump() << "\n";
  }
  for (const auto& h : r.hits) {
    ordered_json j;
    j["type"] = "hit";
    j["url"] = h.hit.url;
    j["source"] = h.source;
    j["score"] = h.hit.score;
    j["matched_terms"] = h.hit.matched_terms;
    out << j.dump() << "\n";
  }
  for (const auto& f : r.frequency) {
    ordered_json j;
    j["type"] = "frequency";
    j["collection"] = f.collection;
    j["df"] = f.df;
    out << j.dump() << "\n";
  }
}

int cmd_query(const Options& o, std::ostream& out) {
  if (o.q.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::invalid_query, "empty query");
  }
  const auto deployment = open_index(o.index);
  std::optional<ActivityLog> log;
  if (!o.log.empty()) log.emplace(o.log);

  QueryRequest request;
  request.text = o.q;
  request.constraints.num_databases = o.k;
  request.constraints.max_results = o.n;
  request.constraints.ttl_ms = o.ttl;
  request.constraints.max_price = o.max_price;
  if (!o.db.empty()) request.target_db = o.db;

  const Broker broker(deployment->collections, deployment->directory, log ? &*log : nullptr);
  const auto response = broker.respond(request);
  if (o.format == "records") {
    print_records(response, out);
  } else {
    print_table(response, out);
  }
  return kOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  ApiConfig config;
  config.set_listen_address(o.listen);
  config.index_path = o.index;
  config.sources = read_sources(sources_path_for(o.index));
  std::optional<ActivityLog> log;
  if (!o.log.empty()) log.emplace(o.log);

  HttpService service(config, log ? &*log : nullptr);
  service.install(open_index(o.index));
  out << "serving " << o.index << " on http://" << config.host << ":" << config.port << "\n"
      << std::flush;
  return service.run() ? kOk : kIoError;
}

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.baseline != "exhaustive") {
    throw Error(ErrorCode::invalid_argument, "only --baseline exhaustive is supported");
  }
  const auto texts = read_queries(o.queries);
  if (texts.empty()) throw Error(ErrorCode::invalid_query, "queries file has no queries");
  const auto deployment = open_index(o.index);

  std::vector<EvalQuery> queries;
  for (const auto& t : texts) queries.push_back({t, std::nullopt, true});
  UtilityConstraints constraints;
  constraints.num_databases = o.k;
  constraints.max_results = o.n;
  const auto report = evaluate_queries(*deployment, queries, constraints);

  std::ofstream file(o.report, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::io_error, "cannot write report '" + o.report + "'");
  file << format_eval_report(report);
  out << format_eval_table(report);
  out << "report written to " << o.report << "\n";
  return kOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const auto records = read_activity_log(o.log);
  out << format_summary(report(records));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  o.session = default_session();

  CLI::App app{"Federated search: ingest topic collections, build the service directory, route "
               "queries to the best collections"};
  app.name("fedsel");
  app.require_subcommand(1, 1);

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus file and register it as a collection");
  ingest->add_option("--collection", o.collection, "Collection name")->required();
  ingest->add_option("--corpus", o.corpus, "Corpus file (one JSON record per line)")->required();
  ingest->add_option("--latency", o.latency, "Estimated latency in ms")->check(CLI::NonNegativeNumber);
  ingest->add_option("--price", o.price, "Price per query")->check(CLI::NonNegativeNumber);
  ingest->add_option("--session", o.session, "Session manifest (env FEDSEL_SESSION)");

  auto* configure = app.add_subcommand("configure", "Build the directory index from the session");
  configure->add_option("--out", o.out, "Index file to write")->required();
  configure->add_option("--session", o.session, "Session manifest (env FEDSEL_SESSION)");
  configure->add_option("--dt", o.d_t, "CORI d_t");
  configure->add_option("--db", o.d_b, "CORI d_b");
  configure->add_option("--policy", o.policy, "default_belief | formula_with_zero_df");

  auto* query = app.add_subcommand("query", "Route one query and print merged hits");
  query->add_option("--index", o.index, "Directory index")->envname("FEDSEL_INDEX")->required();
  query->add_option("--q", o.q, "Query text")->required();
  query->add_option("--k", o.k, "Collections to search")->check(CLI::PositiveNumber);
  query->add_option("--n", o.n, "Maximum hits")->check(CLI::PositiveNumber);
  query->add_option("--ttl", o.ttl, "Latency budget in ms, 0 = unlimited");
  query->add_option("--max-price", o.max_price, "Price cap")->check(CLI::NonNegativeNumber);
  query->add_option("--db", o.db, "Search this collection, skipping selection");
  query->add_option("--format", o.format, "table | records")->check(CLI::IsMember({"table", "records"}));
  query->add_option("--log", o.log, "Append the query to this activity log");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--index", o.index, "Directory index")->envname("FEDSEL_INDEX")->required();
  serve->add_option("--listen", o.listen, "host:port");
  serve->add_option("--log", o.log, "Activity log file");

  auto* eval = app.add_subcommand("eval", "Compare routed and exhaustive search over a query file");
  eval->add_option("--index", o.index, "Directory index")->envname("FEDSEL_INDEX")->required();
  eval->add_option("--queries", o.queries, "One query per line")->required();
  eval->add_option("--baseline", o.baseline, "Baseline mode")->required();
  eval->add_option("--k", o.k, "Collections to search in routed mode")->check(CLI::PositiveNumber);
  eval->add_option("--n", o.n, "Hits per query")->check(CLI::PositiveNumber);
  eval->add_option("--report", o.report, "Machine-readable report path");

  auto* rep = app.add_subcommand("report", "Summarize an activity log");
  rep->add_option("--log", o.log, "Activity log file")->required();

  std::vector<const char*> argv{"fedsel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) return cmd_ingest(o, out);
    if (*configure) return cmd_configure(o, out);
    if (*query) return cmd_query(o, out);
    if (*serve) return cmd_serve(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*rep) return cmd_report(o, out);
  } catch (const Error& e) {
    err << "fedsel: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "fedsel: " << e.what() << "\n";
    return kIoError;
  }
  return kUsage;
}

}  // namespace fedsel::cli

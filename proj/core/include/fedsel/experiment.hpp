#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedsel/broker.hpp"
#include "fedsel/deployment.hpp"
#include "fedsel/directory.hpp"

namespace fedsel {

struct ExperimentCollection {
  std::string name;
  std::size_t record_count = 0;
  std::string topic;
};

struct ExperimentQuery {
  std::string text;
  std::optional<std::string> owning_topic;  // nullopt for background-only queries
};

struct ExperimentSpec {
  std::vector<ExperimentCollection> collections;
  std::uint64_t vocabulary_seed = 0;
  std::vector<ExperimentQuery> queries;

  /// Throws invalid_argument for duplicate names or topics, unknown topics,
  /// and query topics no collection owns.
  void validate() const;

  /// Five collections DB1..DB5 with 119, 105, 81, 108 and 125 records, one
  /// topic each, and four topic-owned queries per topic plus two
  /// background-only queries.
  static ExperimentSpec five_collections(std::uint64_t seed = 20240601);
};

/// Topics the generator has vocabularies for.
std::vector<std::string> experiment_topics();
/// Words of one topic (raw, unstemmed). Throws not_found.
std::span<const std::string_view> topic_vocabulary(std::string_view topic);
/// Words shared by every collection as background noise.
std::span<const std::string_view> background_vocabulary();

struct BuiltExperiment {
  std::vector<CollectionSource> sources;
  std::map<std::string, std::string> owner_of_topic;  // topic -> collection
  std::filesystem::path queries_file;
};

/// Deterministically generates one corpus file per collection plus a queries
/// file under out_dir. About 80% of each document's words come from its
/// topic, the rest from the shared background vocabulary.
BuiltExperiment build_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

struct EvalQuery {
  std::string text;
  std::optional<std::string> expected;  // known owner collection, if any
  // Without a known owner, treat the source of the exhaustive top hit as the
  // expected collection.
  bool infer_expected = true;
};

struct QueryEvaluation {
  std::string query;
  std::optional<std::string> selected;      // top-ranked collection in selective mode
  std::optional<std::string> expected;      // ground truth, or exhaustive top-hit source
  std::optional<bool> agreement;            // undefined without an expectation
  std::optional<bool> top_doc_agreement;    // undefined when exhaustive has no hits
  std::optional<double> overlap_at_10;      // undefined when exhaustive has no hits
  std::size_t collections_searched = 0;     // selective mode
  std::size_t exhaustive_searched = 0;
  std::vector<CollectionFrequency> frequency;

  bool operator==(const QueryEvaluation&) const = default;
};

struct EvalAggregate {
  std::size_t queries = 0;
  std::size_t agreement_queries = 0;  // queries with a defined agreement flag
  double top1_agreement = 0.0;
  std::size_t top_doc_queries = 0;
  double top_doc_agreement = 0.0;
  double mean_overlap_at_10 = 0.0;
  double mean_collections_searched = 0.0;
  double reduction_factor = 0.0;  // |C| / mean_collections_searched

  bool operator==(const EvalAggregate&) const = default;
};

struct EvalReport {
  std::size_t num_collections = 0;
  std::vector<QueryEvaluation> per_query;
  EvalAggregate aggregate;

  bool operator==(const EvalReport&) const = default;
};

/// Runs every query twice: routed to the top num_databases collections, and
/// against all collections. Queries with no searchable terms are rejected
/// with invalid_query.
EvalReport evaluate_queries(const Deployment& deployment, std::span<const EvalQuery> queries,
                            const UtilityConstraints& constraints);

/// build_experiment + ingest + configure + evaluate with the given constraints
/// (num_databases is normally 1).
EvalReport run_experiment(const ExperimentSpec& spec, const CoriParams& params,
                          const UtilityConstraints& constraints,
                          const std::filesystem::path& work_dir);

/// Reads one query per line; blank lines and `#` comments are skipped.
std::vector<std::string> read_queries(const std::filesystem::path& path);

std::string format_eval_report(const EvalReport& report);
EvalReport parse_eval_report(std::string_view text);
std::string format_eval_table(const EvalReport& report);

}  // namespace fedsel

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedsel/activity_log.hpp"
#include "fedsel/collection_index.hpp"
#include "fedsel/directory.hpp"

namespace fedsel {

struct QueryRequest {
  std::string text;
  UtilityConstraints constraints;
  std::optional<std::string> target_db;
  // Accepted and logged nowhere else; has no effect on ranking.
  std::optional<std::string> service_quality;
};

struct SourcedHit {
  SearchHit hit;
  std::string source;

  bool operator==(const SourcedHit&) const = default;
};

struct CollectionFrequency {
  std::string collection;
  std::uint64_t df = 0;

  bool operator==(const CollectionFrequency&) const = default;
};

struct QueryResponse {
  std::string query;
  std::vector<std::string> terms;  // stemmed, sorted, unique
  bool selection_bypassed = false;
  std::vector<RankedCollection> selected;
  std::vector<SourcedHit> hits;
  std::vector<CollectionFrequency> frequency;  // every collection, df desc
  double elapsed_ms = 0.0;
  std::optional<std::string> advisory;  // set when nothing was eligible
};

/// Tokenizes and stems free query text into the distinct query terms.
TermSet analyze_query(std::string_view text);

using CollectionHits = std::pair<std::string, std::vector<SearchHit>>;

/// Merges per-collection hit lists into one list ordered by (score desc,
/// source belief desc, url asc). A URL found in several collections is kept
/// once, from its highest-scoring (then highest-belief) source. Every source
/// must appear in the selection.
std::vector<SourcedHit> merge_results(std::span<const CollectionHits> per_collection,
                                      std::span<const RankedCollection> selection);

/// Routes queries: stem, select collections through the directory, search the
/// selected collections, merge. Holds references only; the collections and
/// directory must outlive it.
class Broker {
 public:
  Broker(const CollectionSet& collections, const ServiceDirectory& directory,
         ActivityLog* log = nullptr);

  /// Throws invalid_query for a query with no usable terms, not_found for an
  /// unknown target_db, no_eligible_database when every collection was
  /// filtered out, and invalid_argument for bad constraints.
  QueryResponse handle_query(const QueryRequest& request) const;

  /// As handle_query, but reports no_eligible_database as a response with
  /// empty selection and hits and an advisory message.
  QueryResponse respond(const QueryRequest& request) const;

  std::vector<CollectionFrequency> frequency_report(const TermSet& terms) const;

 private:
  QueryResponse run(const QueryRequest& request, bool advisory_on_empty) const;

  const CollectionSet& collections_;
  const ServiceDirectory& directory_;
  ActivityLog* log_;
};

/// Structured form of a response. Field order is stable; timing is left out
/// when include_timing is false so responses can be compared.
std::string format_response(const QueryResponse& response, bool include_timing = true);

}  // namespace fedsel

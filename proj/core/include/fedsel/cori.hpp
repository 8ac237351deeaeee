#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedsel/collection_index.hpp"

namespace fedsel {

/// How a query term that a collection does not contain is scored.
enum class MissingTermPolicy {
  default_belief,        // p = d_b
  formula_with_zero_df,  // evaluate the weighted-df formula at df = 0
};

std::string_view to_string(MissingTermPolicy policy) noexcept;
std::optional<MissingTermPolicy> parse_missing_term_policy(std::string_view name) noexcept;

struct CoriParams {
  double d_t = 0.4;
  double d_b = 0.4;
  MissingTermPolicy missing_term_policy = MissingTermPolicy::default_belief;

  /// Throws invalid_argument unless 0 <= d_t < 1 and 0 <= d_b < 1.
  void validate() const;

  bool operator==(const CoriParams&) const = default;
};

/// Both CORI quantities are ratios of logarithms, so the base cancels. The
/// choice is exposed only so that property can be checked.
enum class LogBase { natural, decimal };

/// log((|C| + 0.5) / cf) / log(|C| + 1). nullopt when cf == 0: the term was
/// never seen and carries no evidence.
std::optional<double> inverse_collection_frequency(std::uint32_t cf, std::size_t num_collections,
                                                   LogBase base = LogBase::natural);

/// d_t + (1 - d_t) * log(df + 0.5) / log(df_max + 1). Requires df_max >= 1.
double weighted_df(std::uint32_t df, std::uint32_t df_max, double d_t,
                   LogBase base = LogBase::natural);

/// Belief p(term | collection) from raw statistics. nullopt when df_max == 0,
/// meaning the collection is empty and excluded from formula evaluation.
std::optional<double> term_belief(std::uint32_t df, std::uint32_t df_max, std::uint32_t cf,
                                  std::size_t num_collections, const CoriParams& params,
                                  LogBase base = LogBase::natural);

struct CollectionStats {
  std::size_t record_count = 0;
  std::uint32_t df_max = 0;

  bool operator==(const CollectionStats&) const = default;
};

/// The n x m document-frequency matrix over all collections, with the derived
/// per-collection df_max and per-term cf. Only df >= 1 cells are stored.
class DfMatrix {
 public:
  using Column = std::map<std::string, std::uint32_t, std::less<>>;  // collection -> df

  DfMatrix() = default;

  /// Record counts per collection plus the non-zero df cells. Derives df_max
  /// and cf. Throws invalid_argument on a zero df cell, an unknown collection
  /// or a df larger than the collection's record count.
  DfMatrix(std::map<std::string, std::size_t, std::less<>> record_counts,
           std::map<std::string, Column, std::less<>> cells);

  std::size_t size() const noexcept { return collections_.size(); }
  std::size_t term_count() const noexcept { return cells_.size(); }

  /// Sorted by name.
  const std::vector<std::string>& collections() const noexcept { return names_; }
  bool contains(std::string_view collection) const;

  std::uint32_t df(std::string_view term, std::string_view collection) const;
  std::uint32_t cf(std::string_view term) const;
  std::uint32_t df_max(std::string_view collection) const;
  std::size_t record_count(std::string_view collection) const;

  const std::map<std::string, CollectionStats, std::less<>>& stats() const noexcept {
    return collections_;
  }
  const std::map<std::string, Column, std::less<>>& cells() const noexcept { return cells_; }

  bool operator==(const DfMatrix&) const = default;

 private:
  const CollectionStats& stats_of(std::string_view collection) const;

  std::map<std::string, CollectionStats, std::less<>> collections_;
  std::vector<std::string> names_;
  std::map<std::string, Column, std::less<>> cells_;
};

/// Builds the matrix from every collection's postings. Throws invalid_state
/// when there are no collections.
DfMatrix build_df_matrix(const CollectionSet& collections);

/// Belief of one term in one collection of the matrix. nullopt for an empty
/// collection. Throws not_found for an unknown collection.
std::optional<double> belief(std::string_view term, std::string_view collection,
                             const DfMatrix& matrix, const CoriParams& params);

struct BeliefScore {
  std::string collection;
  double belief = 0.0;
  std::map<std::string, double, std::less<>> per_term;
  bool excluded = false;  // empty collection, scored as d_b

  bool operator==(const BeliefScore&) const = default;
};

/// Mean per-term belief for every collection, sorted by (belief desc, name
/// asc). Empty collections follow all others at belief d_b.
std::vector<BeliefScore> score_query(const TermSet& terms, const DfMatrix& matrix,
                                     const CoriParams& params);

}  // namespace fedsel

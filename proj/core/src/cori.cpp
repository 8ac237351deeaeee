#include "fedsel/cori.hpp"

#include <algorithm>
#include <cmath>

#include "fedsel/error.hpp"

namespace fedsel {

namespace {

double log_in(LogBase base, double x) {
  return base == LogBase::natural ? std::log(x) : std::log10(x);
}

}  // namespace

std::string_view to_string(MissingTermPolicy policy) noexcept {
  switch (policy) {
    case MissingTermPolicy::default_belief: return "default_belief";
    case MissingTermPolicy::formula_with_zero_df: return "formula_with_zero_df";
  }
  return "default_belief";
}

std::optional<MissingTermPolicy> parse_missing_term_policy(std::string_view name) noexcept {
  if (name == "default_belief") return MissingTermPolicy::default_belief;
  if (name == "formula_with_zero_df") return MissingTermPolicy::formula_with_zero_df;
  return std::nullopt;
}

void CoriParams::validate() const {
  auto in_range = [](double v) { return std::isfinite(v) && v >= 0.0 && v < 1.0; };
  if (!in_range(d_t)) throw Error(ErrorCode::invalid_argument, "d_t must lie in [0, 1)");
  if (!in_range(d_b)) throw Error(ErrorCode::invalid_argument, "d_b must lie in [0, 1)");
}

std::optional<double> inverse_collection_frequency(std::uint32_t cf, std::size_t num_collections,
                                                   LogBase base) {
  if (cf == 0) return std::nullopt;
  const double c = static_cast<double>(num_collections);
  return log_in(base, (c + 0.5) / static_cast<double>(cf)) / log_in(base, c + 1.0);
}

double weighted_df(std::uint32_t df, std::uint32_t df_max, double d_t, LogBase base) {
  if (df_max == 0) throw Error(ErrorCode::invalid_argument, "weighted_df needs df_max >= 1");
  return d_t + (1.0 - d_t) * log_in(base, static_cast<double>(df) + 0.5) /
                   log_in(base, static_cast<double>(df_max) + 1.0);
}

std::optional<double> term_belief(std::uint32_t df, std::uint32_t df_max, std::uint32_t cf,
                                  std::size_t num_collections, const CoriParams& params,
                                  LogBase base) {
  if (df_max == 0) return std::nullopt;
  const auto icf = inverse_collection_frequency(cf, num_collections, base);
  if (!icf) return params.d_b;
  if (df == 0 && params.missing_term_policy == MissingTermPolicy::default_belief) {
    return params.d_b;
  }
  return params.d_b + (1.0 - params.d_b) * weighted_df(df, df_max, params.d_t, base) * *icf;
}

DfMatrix::DfMatrix(std::map<std::string, std::size_t, std::less<>> record_counts,
                   std::map<std::string, Column, std::less<>> cells)
    : cells_(std::move(cells)) {
  for (const auto& [name, count] : record_counts) {
    collections_.emplace(name, CollectionStats{count, 0});
    names_.push_back(name);
  }
  for (const auto& [term, column] : cells_) {
    if (column.empty()) {
      throw Error(ErrorCode::invalid_argument, "term '" + term + "' has no df cells");
    }
    for (const auto& [collection, df] : column) {
      auto it = collections_.find(collection);
      if (it == collections_.end()) {
        throw Error(ErrorCode::invalid_argument,
                    "term '" + term + "' refers to unknown collection '" + collection + "'");
      }
      if (df == 0 || df > it->second.record_count) {
        throw Error(ErrorCode::invalid_argument, "df of '" + term + "' in '" + collection +
                                                     "' is outside [1, record_count]");
      }
      it->second.df_max = std::max(it->second.df_max, df);
    }
  }
}

const CollectionStats& DfMatrix::stats_of(std::string_view collection) const {
  auto it = collections_.find(collection);
  if (it == collections_.end()) {
    throw Error(ErrorCode::not_found, "unknown collection '" + std::string(collection) + "'");
  }
  return it->second;
}

bool DfMatrix::contains(std::string_view collection) const {
  return collections_.contains(collection);
}

std::uint32_t DfMatrix::df(std::string_view term, std::string_view collection) const {
  stats_of(collection);
  auto row = cells_.find(term);
  if (row == cells_.end()) return 0;
  auto cell = row->second.find(collection);
  return cell == row->second.end() ? 0 : cell->second;
}

std::uint32_t DfMatrix::cf(std::string_view term) const {
  auto row = cells_.find(term);
  return row == cells_.end() ? 0 : static_cast<std::uint32_t>(row->second.size());
}

std::uint32_t DfMatrix::df_max(std::string_view collection) const {
  return stats_of(collection).df_max;
}

std::size_t DfMatrix::record_count(std::string_view collection) const {
  return stats_of(collection).record_count;
}

DfMatrix build_df_matrix(const CollectionSet& collections) {
  if (collections.empty()) {
    throw Error(ErrorCode::invalid_state, "cannot configure a directory with zero collections");
  }
  std::map<std::string, std::size_t, std::less<>> counts;
  std::map<std::string, DfMatrix::Column, std::less<>> cells;
  for (const auto& [name, index] : collections) {
    counts.emplace(name, index.record_count());
    for (const auto& [term, postings] : index.postings()) {
      cells[term].emplace(name, static_cast<std::uint32_t>(postings.size()));
    }
  }
  return DfMatrix(std::move(counts), std::move(cells));
}

std::optional<double> belief(std::string_view term, std::string_view collection,
                             const DfMatrix& matrix, const CoriParams& params) {
  return term_belief(matrix.df(term, collection), matrix.df_max(collection), matrix.cf(term),
                     matrix.size(), params);
}

std::vector<BeliefScore> score_query(const TermSet& terms, const DfMatrix& matrix,
                                     const CoriParams& params) {
  if (terms.empty()) throw Error(ErrorCode::invalid_argument, "query has no terms");
  params.validate();

  std::vector<BeliefScore> ranked;
  std::vector<BeliefScore> excluded;
  for (const auto& name : matrix.collections()) {
    BeliefScore score{name, 0.0, {}, false};
    double sum = 0.0;
    for (const auto& term : terms) {
      const auto p = belief(term, name, matrix, params);
      if (!p) {
        score.excluded = true;
        break;
      }
      score.per_term.emplace(term, *p);
      sum += *p;
    }
    if (score.excluded) {
      score.per_term.clear();
      for (const auto& term : terms) score.per_term.emplace(term, params.d_b);
      score.belief = params.d_b;
      excluded.push_back(std::move(score));
    } else {
      score.belief = sum / static_cast<double>(terms.size());
      ranked.push_back(std::move(score));
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const BeliefScore& a, const BeliefScore& b) {
    return a.belief > b.belief;  // input is name-ascending
  });
  for (auto& s : excluded) ranked.push_back(std::move(s));
  return ranked;
}

}  // namespace fedsel

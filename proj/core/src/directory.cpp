#include "fedsel/directory.hpp"

#include <algorithm>
#include <cmath>

#include "fedsel/error.hpp"

namespace fedsel {

namespace {

// Min-max normalization; a constant vector maps to all zeros.
std::vector<double> normalize(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / span;
  return out;
}

}  // namespace

void UtilityConstraints::validate() const {
  if (max_results == 0) throw Error(ErrorCode::invalid_argument, "max_results must be at least 1");
  if (num_databases == 0) {
    throw Error(ErrorCode::invalid_argument, "num_databases must be at least 1");
  }
  if (std::isnan(max_price) || max_price < 0.0) {
    throw Error(ErrorCode::invalid_argument, "max_price must be non-negative");
  }
  const auto& w = weights;
  for (double v : {w.relevance, w.time, w.price}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::invalid_argument, "utility weights must be non-negative");
    }
  }
  if (std::abs(w.relevance + w.time + w.price - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_argument, "utility weights must sum to 1");
  }
}

std::vector<RankedCollection> utility_rank(std::span<const BeliefScore> scores,
                                           const ProfileMap& profiles,
                                           const UtilityConstraints& constraints) {
  constraints.validate();
  if (scores.empty()) throw Error(ErrorCode::invalid_argument, "utility_rank needs scores");

  struct Candidate {
    const BeliefScore* score;
    CollectionProfile profile;
  };
  std::vector<Candidate> survivors;
  for (const auto& s : scores) {
    if (s.excluded) continue;
    auto it = profiles.find(s.collection);
    const CollectionProfile profile = it == profiles.end() ? CollectionProfile{} : it->second;
    if (constraints.ttl_ms > 0 &&
        profile.est_latency_ms > static_cast<double>(constraints.ttl_ms)) {
      continue;
    }
    if (profile.price > constraints.max_price) continue;
    survivors.push_back({&s, profile});
  }

  std::vector<double> beliefs, latencies, prices;
  for (const auto& c : survivors) {
    beliefs.push_back(c.score->belief);
    latencies.push_back(c.profile.est_latency_ms);
    prices.push_back(c.profile.price);
  }
  const auto belief_n = normalize(beliefs);
  const auto latency_n = normalize(latencies);
  const auto price_n = normalize(prices);

  const auto& w = constraints.weights;
  std::vector<RankedCollection> ranked;
  ranked.reserve(survivors.size());
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    const double utility =
        w.relevance * belief_n[i] - w.time * latency_n[i] - w.price * price_n[i];
    ranked.push_back({survivors[i].score->collection, survivors[i].score->belief, utility, 0});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedCollection& a, const RankedCollection& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    if (a.belief != b.belief) return a.belief > b.belief;
    return a.collection < b.collection;
  });
  if (ranked.size() > constraints.num_databases) ranked.resize(constraints.num_databases);
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = i + 1;
  return ranked;
}

std::map<std::string, MaxOwner, std::less<>> compute_max_owner(const DfMatrix& matrix) {
  std::map<std::string, MaxOwner, std::less<>> view;
  for (const auto& [term, column] : matrix.cells()) {
    MaxOwner best;
    // column iterates in name order, so strict > keeps the first name on ties
    for (const auto& [collection, df] : column) {
      if (df > best.df) best = {collection, df};
    }
    view.emplace(term, std::move(best));
  }
  return view;
}

ServiceDirectory::ServiceDirectory(DfMatrix matrix, ProfileMap profiles, CoriParams params)
    : matrix_(std::move(matrix)), profiles_(std::move(profiles)), params_(params) {
  params_.validate();
  for (const auto& [name, profile] : profiles_) {
    if (!matrix_.contains(name)) {
      throw Error(ErrorCode::not_found, "profile for unknown collection '" + name + "'");
    }
    if (!(profile.est_latency_ms >= 0.0) || !(profile.price >= 0.0) ||
        !std::isfinite(profile.est_latency_ms) || !std::isfinite(profile.price)) {
      throw Error(ErrorCode::invalid_argument,
                  "latency and price of '" + name + "' must be finite and non-negative");
    }
  }
  for (const auto& name : matrix_.collections()) profiles_.try_emplace(name);
  max_owner_ = compute_max_owner(matrix_);
}

ServiceDirectory ServiceDirectory::configure(const CollectionSet& collections,
                                             ProfileMap profiles, CoriParams params) {
  return ServiceDirectory(build_df_matrix(collections), std::move(profiles), params);
}

std::optional<MaxOwner> ServiceDirectory::max_owner(std::string_view term) const {
  auto it = max_owner_.find(term);
  if (it == max_owner_.end()) return std::nullopt;
  return it->second;
}

std::vector<BeliefScore> ServiceDirectory::score(const TermSet& terms) const {
  return score_query(terms, matrix_, params_);
}

std::vector<RankedCollection> ServiceDirectory::rank(const TermSet& terms,
                                                     const UtilityConstraints& constraints) const {
  const auto scores = score(terms);
  return utility_rank(scores, profiles_, constraints);
}

std::vector<std::pair<std::string, std::uint64_t>> ServiceDirectory::frequency_report(
    const TermSet& terms) const {
  std::vector<std::pair<std::string, std::uint64_t>> report;
  for (const auto& name : matrix_.collections()) {
    std::uint64_t total = 0;
    for (const auto& term : terms) total += matrix_.df(term, name);
    report.emplace_back(name, total);
  }
  std::stable_sort(report.begin(), report.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return report;
}

}  // namespace fedsel

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedsel/collection_index.hpp"
#include "fedsel/cori.hpp"

namespace fedsel {

struct UtilityWeights {
  double relevance = 0.6;
  double time = 0.2;
  double price = 0.2;

  bool operator==(const UtilityWeights&) const = default;
};

/// Request-side limits applied after belief ranking.
struct UtilityConstraints {
  std::size_t max_results = 10;
  std::size_t num_databases = 1;
  std::uint64_t ttl_ms = 0;  // 0 = unlimited
  double max_price = std::numeric_limits<double>::infinity();
  UtilityWeights weights;

  /// Throws invalid_argument on zero counts, negative values or weights that
  /// do not sum to 1 within 1e-9.
  void validate() const;
};

/// Cost model of one collection as advertised to the directory.
struct CollectionProfile {
  double est_latency_ms = 0.0;
  double price = 0.0;

  bool operator==(const CollectionProfile&) const = default;
};

using ProfileMap = std::map<std::string, CollectionProfile, std::less<>>;

struct RankedCollection {
  std::string collection;
  double belief = 0.0;
  double utility = 0.0;
  std::size_t rank = 0;  // 1-based

  bool operator==(const RankedCollection&) const = default;
};

/// Second selection step. Collections over the latency budget (when ttl > 0)
/// or the price cap are dropped, as are empty (excluded) collections. Belief,
/// latency and price are min-max normalized over the survivors, with constant
/// vectors mapping to 0, and combined as
///   w_rel * belief - w_time * latency - w_price * price.
/// Output is ordered by (utility desc, belief desc, name asc) and truncated to
/// num_databases. Collections without a profile cost nothing.
std::vector<RankedCollection> utility_rank(std::span<const BeliefScore> scores,
                                           const ProfileMap& profiles,
                                           const UtilityConstraints& constraints);

struct MaxOwner {
  std::string collection;
  std::uint32_t df = 0;

  bool operator==(const MaxOwner&) const = default;
};

/// Collection statistics plus cost profiles: everything needed to rank
/// collections for a query. Immutable once built.
class ServiceDirectory {
 public:
  /// Profiles missing for a collection default to zero cost; profiles naming
  /// unknown collections are rejected with not_found.
  ServiceDirectory(DfMatrix matrix, ProfileMap profiles, CoriParams params);

  /// Builds the df matrix from the collections. Throws invalid_state for zero
  /// collections.
  static ServiceDirectory configure(const CollectionSet& collections, ProfileMap profiles = {},
                                    CoriParams params = {});

  const DfMatrix& matrix() const noexcept { return matrix_; }
  const ProfileMap& profiles() const noexcept { return profiles_; }
  const CoriParams& params() const noexcept { return params_; }

  /// Collection holding the term in the most documents, ties broken by name.
  std::optional<MaxOwner> max_owner(std::string_view term) const;
  const std::map<std::string, MaxOwner, std::less<>>& max_owner_view() const noexcept {
    return max_owner_;
  }

  std::vector<BeliefScore> score(const TermSet& terms) const;
  std::vector<RankedCollection> rank(const TermSet& terms,
                                     const UtilityConstraints& constraints) const;

  /// Summed df of the terms per collection, sorted by (df desc, name asc).
  std::vector<std::pair<std::string, std::uint64_t>> frequency_report(const TermSet& terms) const;

  bool operator==(const ServiceDirectory& other) const {
    return matrix_ == other.matrix_ && profiles_ == other.profiles_ && params_ == other.params_;
  }

 private:
  DfMatrix matrix_;
  ProfileMap profiles_;
  CoriParams params_;
  std::map<std::string, MaxOwner, std::less<>> max_owner_;
};

/// Computes the max-owner view from the full matrix.
std::map<std::string, MaxOwner, std::less<>> compute_max_owner(const DfMatrix& matrix);

/// Directory index text format, version 1.
std::string format_index(const ServiceDirectory& directory);

/// Throws format_version for an unknown header version and corrupt_index for
/// anything malformed or internally inconsistent.
ServiceDirectory parse_index(std::string_view text);

void save_index(const ServiceDirectory& directory, const std::filesystem::path& path);
ServiceDirectory load_index(const std::filesystem::path& path);

}  // namespace fedsel

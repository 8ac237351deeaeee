#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fedsel/collection_index.hpp"
#include "fedsel/directory.hpp"

namespace fedsel {

/// Where a collection's documents come from and what it costs to query.
struct CollectionSource {
  std::string name;
  std::filesystem::path corpus;
  CollectionProfile profile;

  bool operator==(const CollectionSource&) const = default;
};

/// Sources manifest: a small JSON document listing CollectionSource entries.
/// Written next to a directory index so later commands can re-read corpora.
std::vector<CollectionSource> read_sources(const std::filesystem::path& path);
void write_sources(const std::filesystem::path& path, std::span<const CollectionSource> sources);

/// `<index>.sources`
std::filesystem::path sources_path_for(const std::filesystem::path& index_path);

/// Collections and the directory built over them. Immutable and shared.
struct Deployment {
  CollectionSet collections;
  ServiceDirectory directory;
};

CollectionSet load_collections(std::span<const CollectionSource> sources);
ProfileMap profiles_of(std::span<const CollectionSource> sources);

/// Ingests every source and configures a fresh directory.
std::shared_ptr<const Deployment> build_deployment(std::span<const CollectionSource> sources,
                                                   const CoriParams& params = {});

/// Loads a persisted directory index and re-ingests the corpora behind it.
/// Throws corrupt_index when the corpora no longer match the index.
std::shared_ptr<const Deployment> open_deployment(const std::filesystem::path& index_path,
                                                  std::span<const CollectionSource> sources);

}  // namespace fedsel

#include "fedsel/deployment.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "fedsel/corpus.hpp"
#include "fedsel/error.hpp"

namespace fedsel {

std::vector<CollectionSource> read_sources(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read sources '" + path.string() + "'");
  std::vector<CollectionSource> out;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& e : j.at("collections")) {
      CollectionSource s;
      s.name = e.at("name").get<std::string>();
      s.corpus = e.at("corpus").get<std::string>();
      s.profile.est_latency_ms = e.value("latency_ms", 0.0);
      s.profile.price = e.value("price", 0.0);
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, "bad sources file '" + path.string() + "': " + e.what());
  }
  return out;
}

void write_sources(const std::filesystem::path& path, std::span<const CollectionSource> sources) {
  std::vector<CollectionSource> sorted(sources.begin(), sources.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  nlohmann::ordered_json j;
  j["version"] = 1;
  auto& list = j["collections"] = nlohmann::ordered_json::array();
  for (const auto& s : sorted) {
    nlohmann::ordered_json e;
    e["name"] = s.name;
    e["corpus"] = s.corpus.string();
    e["latency_ms"] = s.profile.est_latency_ms;
    e["price"] = s.profile.price;
    list.push_back(std::move(e));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write sources '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failure on '" + path.string() + "'");
}

std::filesystem::path sources_path_for(const std::filesystem::path& index_path) {
  auto p = index_path;
  p += ".sources";
  return p;
}

CollectionSet load_collections(std::span<const CollectionSource> sources) {
  CollectionSet collections;
  for (const auto& s : sources) {
    collections.create(s.name);
    load_corpus(s.corpus, collections, s.name);
  }
  return collections;
}

ProfileMap profiles_of(std::span<const CollectionSource> sources) {
  ProfileMap profiles;
  for (const auto& s : sources) profiles.insert_or_assign(s.name, s.profile);
  return profiles;
}

std::shared_ptr<const Deployment> build_deployment(std::span<const CollectionSource> sources,
                                                   const CoriParams& params) {
  auto collections = load_collections(sources);
  auto directory = ServiceDirectory::configure(collections, profiles_of(sources), params);
  return std::make_shared<const Deployment>(
      Deployment{std::move(collections), std::move(directory)});
}

std::shared_ptr<const Deployment> open_deployment(const std::filesystem::path& index_path,
                                                  std::span<const CollectionSource> sources) {
  auto directory = load_index(index_path);
  auto collections = load_collections(sources);
  if (collections.names() != directory.matrix().collections()) {
    throw Error(ErrorCode::corrupt_index,
                "index '" + index_path.string() + "' lists different collections than its sources");
  }
  for (const auto& name : collections.names()) {
    if (collections.record_count(name) != directory.matrix().record_count(name)) {
      throw Error(ErrorCode::corrupt_index, "corpus of '" + name + "' changed since '" +
                                                index_path.string() + "' was configured");
    }
  }
  return std::make_shared<const Deployment>(
      Deployment{std::move(collections), std::move(directory)});
}

}  // namespace fedsel

#pragma once

// Small hand-built deployments shared by broker, service and CLI tests.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fedsel/corpus.hpp"
#include "fedsel/deployment.hpp"

namespace test {

/// Three topical corpora written under dir: edu (education), med (medicine)
/// and mix (a little of both plus cooking).
inline std::vector<fedsel::CollectionSource> write_small_corpora(const std::filesystem::path& dir) {
  using fedsel::RawDocument;
  std::vector<RawDocument> edu, med, mix;
  for (int i = 0; i < 12; ++i) {
    edu.push_back({"http://edu.example/" + std::to_string(i), "Education notes",
                   "school teachers teaching students education curriculum" +
                       std::string(i % 3 == 0 ? " education education" : ""),
                   "education"});
  }
  for (int i = 0; i < 9; ++i) {
    med.push_back({"http://med.example/" + std::to_string(i), std::nullopt,
                   "hospital patients medicine doctors treatment" +
                       std::string(i % 2 == 0 ? " surgery" : ""),
                   "medicine"});
  }
  for (int i = 0; i < 6; ++i) {
    mix.push_back({"http://mix.example/" + std::to_string(i), "Misc",
                   i < 2 ? "recipes kitchen baking education" : "recipes cooking hospital",
                   std::nullopt});
  }
  fedsel::write_corpus(dir / "edu.jsonl", edu);
  fedsel::write_corpus(dir / "med.jsonl", med);
  fedsel::write_corpus(dir / "mix.jsonl", mix);
  return {{"edu", dir / "edu.jsonl", {20, 1}},
          {"med", dir / "med.jsonl", {5, 2}},
          {"mix", dir / "mix.jsonl", {50, 0.5}}};
}

}  // namespace test

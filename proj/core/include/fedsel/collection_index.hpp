#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fedsel {

/// Stem -> occurrence count within one document.
using TermCounts = std::map<std::string, std::uint32_t, std::less<>>;

/// Query terms, already stemmed. Ordered so results are deterministic.
using TermSet = std::set<std::string, std::less<>>;

struct TokenizedDocument {
  std::string url;
  TermCounts terms;
};

struct PostingEntry {
  std::string url;
  std::uint32_t term_count = 0;
};

struct SearchHit {
  std::string url;
  std::vector<std::string> matched_terms;  // sorted, non-empty
  std::uint64_t score = 0;                 // summed occurrences of matched terms

  bool operator==(const SearchHit&) const = default;
};

/// One topic-specific document database: an inverted index from stem to the
/// documents containing it. Built by repeated add(), then only read.
class CollectionIndex {
 public:
  explicit CollectionIndex(std::string name);

  const std::string& name() const noexcept { return name_; }

  /// Throws Error(duplicate_document) if the URL is already present.
  void add(TokenizedDocument doc);

  std::size_t record_count() const noexcept { return documents_.size(); }
  std::uint32_t term_df(std::string_view term) const;
  std::uint32_t max_df() const noexcept { return max_df_; }
  bool contains(std::string_view url) const;

  /// nullptr when the URL is unknown.
  const TermCounts* document(std::string_view url) const;

  /// OR-match over the terms, ordered by (score desc, url asc).
  std::vector<SearchHit> search(const TermSet& terms, std::size_t limit) const;

  /// Stem -> postings, postings sorted by URL.
  const std::map<std::string, std::vector<PostingEntry>, std::less<>>& postings() const noexcept {
    return postings_;
  }

 private:
  std::string name_;
  std::map<std::string, TermCounts, std::less<>> documents_;
  std::map<std::string, std::vector<PostingEntry>, std::less<>> postings_;
  std::uint32_t max_df_ = 0;
};

/// The named collections of one deployment. Collection names are unique and
/// compared exactly.
class CollectionSet {
 public:
  CollectionIndex& create(std::string name);
  bool contains(std::string_view name) const;
  CollectionIndex& at(std::string_view name);
  const CollectionIndex& at(std::string_view name) const;

  /// Sorted by name.
  std::vector<std::string> names() const;
  std::size_t size() const noexcept { return collections_.size(); }
  bool empty() const noexcept { return collections_.empty(); }

  std::uint32_t term_df(std::string_view collection, std::string_view term) const;
  std::uint32_t max_df(std::string_view collection) const;
  std::size_t record_count(std::string_view collection) const;
  std::vector<SearchHit> search(std::string_view collection, const TermSet& terms,
                                std::size_t limit) const;

  auto begin() const { return collections_.begin(); }
  auto end() const { return collections_.end(); }

 private:
  std::map<std::string, CollectionIndex, std::less<>> collections_;
};

}  // namespace fedsel

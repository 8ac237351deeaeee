#include "fedsel/collection_index.hpp"

#include <algorithm>

#include "fedsel/error.hpp"

namespace fedsel {

CollectionIndex::CollectionIndex(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw Error(ErrorCode::invalid_argument, "collection name must not be empty");
}

void CollectionIndex::add(TokenizedDocument doc) {
  if (doc.url.empty()) throw Error(ErrorCode::invalid_argument, "document url must not be empty");
  if (documents_.contains(doc.url)) {
    throw Error(ErrorCode::duplicate_document,
                "duplicate document '" + doc.url + "' in collection '" + name_ + "'");
  }
  for (const auto& [term, count] : doc.terms) {
    if (count == 0) continue;
    auto& list = postings_[term];
    auto pos = std::lower_bound(list.begin(), list.end(), doc.url,
                                [](const PostingEntry& e, const std::string& u) { return e.url < u; });
    list.insert(pos, PostingEntry{doc.url, count});
    max_df_ = std::max(max_df_, static_cast<std::uint32_t>(list.size()));
  }
  std::erase_if(doc.terms, [](const auto& kv) { return kv.second == 0; });
  documents_.emplace(std::move(doc.url), std::move(doc.terms));
}

std::uint32_t CollectionIndex::term_df(std::string_view term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

bool CollectionIndex::contains(std::string_view url) const { return documents_.contains(url); }

const TermCounts* CollectionIndex::document(std::string_view url) const {
  auto it = documents_.find(url);
  return it == documents_.end() ? nullptr : &it->second;
}

std::vector<SearchHit> CollectionIndex::search(const TermSet& terms, std::size_t limit) const {
  if (terms.empty()) throw Error(ErrorCode::invalid_argument, "search needs at least one term");
  if (limit == 0) throw Error(ErrorCode::invalid_argument, "search limit must be at least 1");

  std::map<std::string_view, SearchHit> by_url;
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    for (const auto& entry : it->second) {
      auto& hit = by_url[entry.url];
      if (hit.url.empty()) hit.url = entry.url;
      hit.matched_terms.push_back(term);  // terms iterate in sorted order
      hit.score += entry.term_count;
    }
  }

  std::vector<SearchHit> hits;
  hits.reserve(by_url.size());
  for (auto& [url, hit] : by_url) hits.push_back(std::move(hit));
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.url < b.url;
  });
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

CollectionIndex& CollectionSet::create(std::string name) {
  if (collections_.contains(name)) {
    throw Error(ErrorCode::invalid_argument, "collection '" + name + "' already exists");
  }
  auto key = name;
  return collections_.emplace(std::move(key), CollectionIndex(std::move(name))).first->second;
}

bool CollectionSet::contains(std::string_view name) const { return collections_.contains(name); }

CollectionIndex& CollectionSet::at(std::string_view name) {
  auto it = collections_.find(name);
  if (it == collections_.end()) {
    throw Error(ErrorCode::not_found, "unknown collection '" + std::string(name) + "'");
  }
  return it->second;
}

const CollectionIndex& CollectionSet::at(std::string_view name) const {
  return const_cast<CollectionSet*>(this)->at(name);
}

std::vector<std::string> CollectionSet::names() const {
  std::vector<std::string> out;
  out.reserve(collections_.size());
  for (const auto& [name, _] : collections_) out.push_back(name);
  return out;
}

std::uint32_t CollectionSet::term_df(std::string_view collection, std::string_view term) const {
  return at(collection).term_df(term);
}

std::uint32_t CollectionSet::max_df(std::string_view collection) const {
  return at(collection).max_df();
}

std::size_t CollectionSet::record_count(std::string_view collection) const {
  return at(collection).record_count();
}

std::vector<SearchHit> CollectionSet::search(std::string_view collection, const TermSet& terms,
                                             std::size_t limit) const {
  return at(collection).search(terms, limit);
}

}  // namespace fedsel

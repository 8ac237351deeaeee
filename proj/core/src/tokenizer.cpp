#include "fedsel/tokenizer.hpp"

#include <algorithm>
#include <array>

namespace fedsel {
namespace {

// Version 1 of the stopword list. Changing it changes every df statistic, so
// keep it sorted and bump the version note when editing.
constexpr std::array<std::string_view, 33> kStopwords = {
    "a",    "about", "an",   "and",  "are",  "as",    "at",   "be",    "but",
    "by",   "for",   "from", "has",  "have", "he",    "in",   "is",    "it",
    "its",  "not",   "of",   "on",   "or",   "she",   "that", "the",   "this",
    "to",   "was",   "were", "which", "will", "with",
};

static_assert(std::is_sorted(kStopwords.begin(), kStopwords.end()));

}  // namespace

std::span<const std::string_view> stopwords() noexcept { return kStopwords; }

bool is_stopword(std::string_view word) noexcept {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), word);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() > 1 && !is_stopword(current)) tokens.push_back(current);
    current.clear();
  };
  for (const char raw : text) {
    char c = raw;
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c >= 'a' && c <= 'z') {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace fedsel

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fedsel {

/// Lowercases ASCII letters and splits on anything outside a-z. Tokens of
/// length one and stopwords are dropped. Order of appearance is kept.
std::vector<std::string> tokenize(std::string_view text);

/// The frozen English stopword list, sorted.
std::span<const std::string_view> stopwords() noexcept;

bool is_stopword(std::string_view word) noexcept;

}  // namespace fedsel

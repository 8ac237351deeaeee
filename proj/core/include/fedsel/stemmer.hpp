#pragma once

#include <string>
#include <string_view>

namespace fedsel {

/// Porter (1980) suffix-stripping stemmer, matching the reference C
/// implementation distributed with the published vocabulary. Input must be a
/// non-empty lowercase a-z word; anything else throws Error(invalid_argument).
/// Words of one or two letters are returned unchanged.
std::string porter_stem(std::string_view word);

/// True when the word is non-empty and made of a-z only.
bool is_stemmable(std::string_view word) noexcept;

}  // namespace fedsel

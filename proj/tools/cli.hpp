#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fedsel::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kIoError = 2;
inline constexpr int kDuplicate = 3;
inline constexpr int kNoCollections = 4;
inline constexpr int kBadIndex = 5;
inline constexpr int kBadQuery = 6;

/// Runs one `fedsel` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fedsel::cli

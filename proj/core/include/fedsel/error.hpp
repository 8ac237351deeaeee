#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedsel {

enum class ErrorCode {
  invalid_argument,
  not_found,
  duplicate_document,
  parse_error,
  io_error,
  invalid_state,
  corrupt_index,
  format_version,
  invalid_query,
  no_eligible_database,
};

/// Stable snake_case name, used as the machine-readable `code` in HTTP errors.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fedsel

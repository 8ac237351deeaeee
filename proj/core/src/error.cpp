#include "fedsel/error.hpp"

namespace fedsel {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::duplicate_document: return "duplicate_document";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::invalid_state: return "invalid_state";
    case ErrorCode::corrupt_index: return "corrupt_index";
    case ErrorCode::format_version: return "format_version";
    case ErrorCode::invalid_query: return "invalid_query";
    case ErrorCode::no_eligible_database: return "no_eligible_database";
  }
  return "unknown";
}

}  // namespace fedsel

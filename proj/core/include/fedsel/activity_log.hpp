#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fedsel {

/// One searching activity, as recorded by the broker.
struct ActivityRecord {
  std::uint64_t sequence = 0;  // assigned by the log, starting at 1
  std::string query;
  std::vector<std::string> terms;
  std::vector<std::string> selected;
  std::size_t hits = 0;
  bool selection_bypassed = false;
  std::string outcome = "ok";  // "ok" or an error code name

  bool operator==(const ActivityRecord&) const = default;
};

std::string format_activity_record(const ActivityRecord& record);
/// Throws parse_error.
ActivityRecord parse_activity_record(std::string_view line);

/// Append-only, thread-safe. When a file is attached its existing records are
/// loaded first and every new record is appended to it as one line.
class ActivityLog {
 public:
  ActivityLog() = default;
  explicit ActivityLog(const std::filesystem::path& file);

  /// Returns the assigned sequence number.
  std::uint64_t append(ActivityRecord record);
  std::vector<ActivityRecord> records() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<ActivityRecord> records_;
  std::optional<std::ofstream> sink_;
};

/// Reads a log file written by ActivityLog. A missing file is an io_error.
std::vector<ActivityRecord> read_activity_log(const std::filesystem::path& file);

struct ActivitySummary {
  std::size_t queries = 0;
  std::size_t total_terms = 0;
  std::size_t total_collections_selected = 0;
  std::size_t total_hits = 0;
  std::size_t bypassed = 0;
  std::size_t failed = 0;
  std::vector<ActivityRecord> per_query;

  bool operator==(const ActivitySummary&) const = default;
};

ActivitySummary report(std::span<const ActivityRecord> log);

std::string format_summary(const ActivitySummary& summary);

}  // namespace fedsel

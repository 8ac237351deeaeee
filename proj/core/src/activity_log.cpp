#include "fedsel/activity_log.hpp"

#include <sstream>

#include <json.hpp>

#include "fedsel/error.hpp"

namespace fedsel {

std::string format_activity_record(const ActivityRecord& r) {
  nlohmann::ordered_json j;
  j["seq"] = r.sequence;
  j["query"] = r.query;
  j["terms"] = r.terms;
  j["selected"] = r.selected;
  j["hits"] = r.hits;
  j["bypassed"] = r.selection_bypassed;
  j["outcome"] = r.outcome;
  return j.dump();
}

ActivityRecord parse_activity_record(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    ActivityRecord r;
    r.sequence = j.at("seq").get<std::uint64_t>();
    r.query = j.at("query").get<std::string>();
    r.terms = j.at("terms").get<std::vector<std::string>>();
    r.selected = j.at("selected").get<std::vector<std::string>>();
    r.hits = j.at("hits").get<std::size_t>();
    r.selection_bypassed = j.at("bypassed").get<bool>();
    r.outcome = j.at("outcome").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad activity record: ") + e.what());
  }
}

ActivityLog::ActivityLog(const std::filesystem::path& file) {
  if (std::filesystem::exists(file)) records_ = read_activity_log(file);
  sink_.emplace(file, std::ios::binary | std::ios::app);
  if (!*sink_) throw Error(ErrorCode::io_error, "cannot open activity log '" + file.string() + "'");
}

std::uint64_t ActivityLog::append(ActivityRecord record) {
  std::lock_guard lock(mutex_);
  record.sequence = records_.size() + 1;
  if (sink_) {
    *sink_ << format_activity_record(record) << '\n';
    sink_->flush();
  }
  records_.push_back(std::move(record));
  return records_.back().sequence;
}

std::vector<ActivityRecord> ActivityLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::size_t ActivityLog::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::vector<ActivityRecord> read_activity_log(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read activity log '" + file.string() + "'");
  std::vector<ActivityRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_activity_record(line));
  }
  return out;
}

ActivitySummary report(std::span<const ActivityRecord> log) {
  ActivitySummary s;
  for (const auto& r : log) {
    ++s.queries;
    s.total_terms += r.terms.size();
    s.total_collections_selected += r.selected.size();
    s.total_hits += r.hits;
    if (r.selection_bypassed) ++s.bypassed;
    if (r.outcome != "ok") ++s.failed;
    s.per_query.push_back(r);
  }
  return s;
}

std::string format_summary(const ActivitySummary& s) {
  std::ostringstream out;
  out << "queries " << s.queries << "  terms " << s.total_terms << "  collections selected "
      << s.total_collections_selected << "  hits " << s.total_hits << "  bypassed " << s.bypassed
      << "  failed " << s.failed << "\n";
  for (const auto& r : s.per_query) {
    out << "#" << r.sequence << "\t" << r.query << "\tterms=" << r.terms.size()
        << "\tselected=" << r.selected.size() << "\thits=" << r.hits;
    if (r.selection_bypassed) out << "\tbypassed";
    if (r.outcome != "ok") out << "\t" << r.outcome;
    out << "\n";
  }
  return out.str();
}

}  // namespace fedsel

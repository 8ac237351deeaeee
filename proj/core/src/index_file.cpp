// Directory index persistence.
//
//   FEDSEL-DIR v1 dt=<real> db=<real> policy=<name>
//   C\t<name>\t<record_count>\t<df_max>\t<est_latency_ms>\t<price>
//   T\t<term>\t<collection>\t<df>
//   END\t<number of C lines>\t<number of T lines>
//
// Lines are sorted within each section. Reals use the shortest round-trip
// representation. cf and the max-owner view are derived on load; df_max is
// stored and must match the value recomputed from the T lines. The END
// trailer makes truncation at a line boundary detectable.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fedsel/directory.hpp"
#include "fedsel/error.hpp"
#include "fedsel/stemmer.hpp"

namespace fedsel {

namespace {

constexpr std::string_view kMagic = "FEDSEL-DIR";
constexpr std::string_view kVersion = "v1";

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error(ErrorCode::invalid_argument, "cannot format real");
  return std::string(buf, ptr);
}

[[noreturn]] void corrupt(std::size_t line_no, const std::string& why) {
  throw Error(ErrorCode::corrupt_index, "corrupt index at line " + std::to_string(line_no) + ": " + why);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    corrupt(line_no, std::string("bad ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void check_name(const std::string& name) {
  if (name.empty() || name.find_first_of("\t\n\r") != std::string::npos) {
    throw Error(ErrorCode::invalid_argument,
                "collection name '" + name + "' cannot be stored in an index file");
  }
}

}  // namespace

std::string format_index(const ServiceDirectory& directory) {
  const auto& params = directory.params();
  const auto& matrix = directory.matrix();

  std::vector<std::string> c_lines;
  for (const auto& [name, stats] : matrix.stats()) {
    check_name(name);
    const auto& profile = directory.profiles().at(name);
    c_lines.push_back("C\t" + name + "\t" + std::to_string(stats.record_count) + "\t" +
                      std::to_string(stats.df_max) + "\t" + format_real(profile.est_latency_ms) +
                      "\t" + format_real(profile.price));
  }
  std::vector<std::string> t_lines;
  for (const auto& [term, column] : matrix.cells()) {
    for (const auto& [collection, df] : column) {
      t_lines.push_back("T\t" + term + "\t" + collection + "\t" + std::to_string(df));
    }
  }
  std::sort(c_lines.begin(), c_lines.end());
  std::sort(t_lines.begin(), t_lines.end());

  std::string out;
  out += std::string(kMagic) + " " + std::string(kVersion) + " dt=" + format_real(params.d_t) +
         " db=" + format_real(params.d_b) + " policy=" +
         std::string(to_string(params.missing_term_policy)) + "\n";
  for (const auto& l : c_lines) out += l + "\n";
  for (const auto& l : t_lines) out += l + "\n";
  out += "END\t" + std::to_string(c_lines.size()) + "\t" + std::to_string(t_lines.size()) + "\n";
  return out;
}

ServiceDirectory parse_index(std::string_view text) {
  if (text.empty()) corrupt(1, "empty file");
  if (text.back() != '\n') corrupt(0, "file is truncated (no final newline)");
  text.remove_suffix(1);
  const auto lines = split(text, '\n');

  // Header
  const auto header = split(lines[0], ' ');
  if (header.empty() || header[0] != kMagic) corrupt(1, "missing FEDSEL-DIR header");
  if (header.size() < 2 || header[1] != kVersion) {
    throw Error(ErrorCode::format_version,
                "unsupported index version '" + std::string(header.size() > 1 ? header[1] : "") + "'");
  }
  if (header.size() != 5) corrupt(1, "malformed header");
  auto value_of = [&](std::string_view field, std::string_view key) {
    if (!field.starts_with(key)) corrupt(1, "expected '" + std::string(key) + "'");
    return field.substr(key.size());
  };
  CoriParams params;
  params.d_t = parse_number<double>(value_of(header[2], "dt="), 1, "dt");
  params.d_b = parse_number<double>(value_of(header[3], "db="), 1, "db");
  const auto policy = parse_missing_term_policy(value_of(header[4], "policy="));
  if (!policy) corrupt(1, "unknown policy");
  params.missing_term_policy = *policy;
  try {
    params.validate();
  } catch (const Error& e) {
    corrupt(1, e.what());
  }

  std::map<std::string, std::size_t, std::less<>> counts;
  std::map<std::string, std::uint32_t, std::less<>> stored_df_max;
  ProfileMap profiles;
  std::map<std::string, DfMatrix::Column, std::less<>> cells;

  // Trailer
  const auto trailer = split(lines.back(), '\t');
  if (lines.size() < 2 || trailer.size() != 3 || trailer[0] != "END") {
    corrupt(lines.size(), "missing END trailer (file truncated?)");
  }
  const auto expected_c = parse_number<std::size_t>(trailer[1], lines.size(), "collection line count");
  const auto expected_t = parse_number<std::size_t>(trailer[2], lines.size(), "term line count");
  std::size_t seen_c = 0, seen_t = 0;

  bool in_terms = false;
  std::string_view previous;
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto line = lines[i];
    const auto fields = split(line, '\t');
    if (fields[0] == "C") {
      if (in_terms) corrupt(line_no, "collection line after term lines");
      if (!previous.empty() && !(previous < line)) corrupt(line_no, "collection lines out of order");
      if (fields.size() != 6 || fields[1].empty()) corrupt(line_no, "malformed collection line");
      const std::string name(fields[1]);
      counts.emplace(name, parse_number<std::size_t>(fields[2], line_no, "record count"));
      stored_df_max.emplace(name, parse_number<std::uint32_t>(fields[3], line_no, "df_max"));
      CollectionProfile profile;
      profile.est_latency_ms = parse_number<double>(fields[4], line_no, "latency");
      profile.price = parse_number<double>(fields[5], line_no, "price");
      profiles.emplace(name, profile);
      ++seen_c;
    } else if (fields[0] == "T") {
      if (!in_terms) previous = {};
      in_terms = true;
      if (!previous.empty() && !(previous < line)) corrupt(line_no, "term lines out of order");
      if (fields.size() != 4) corrupt(line_no, "malformed term line");
      if (!is_stemmable(fields[1])) corrupt(line_no, "invalid term '" + std::string(fields[1]) + "'");
      if (!counts.contains(fields[2])) {
        corrupt(line_no, "term line names unknown collection '" + std::string(fields[2]) + "'");
      }
      const auto df = parse_number<std::uint32_t>(fields[3], line_no, "df");
      if (df == 0) corrupt(line_no, "zero df stored");
      auto& column = cells[std::string(fields[1])];
      if (!column.emplace(std::string(fields[2]), df).second) {
        corrupt(line_no, "duplicate term/collection cell");
      }
      ++seen_t;
    } else {
      corrupt(line_no, "unknown record type");
    }
    previous = line;
  }
  if (seen_c != expected_c || seen_t != expected_t) {
    corrupt(lines.size(), "trailer expects " + std::to_string(expected_c) + " collection and " +
                              std::to_string(expected_t) + " term lines, found " +
                              std::to_string(seen_c) + " and " + std::to_string(seen_t));
  }
  if (counts.empty()) corrupt(lines.size(), "no collections");

  DfMatrix matrix;
  try {
    matrix = DfMatrix(std::move(counts), std::move(cells));
  } catch (const Error& e) {
    corrupt(0, e.what());
  }
  for (const auto& [name, df_max] : stored_df_max) {
    if (matrix.df_max(name) != df_max) {
      corrupt(0, "stored df_max of '" + name + "' is " + std::to_string(df_max) +
                     " but term lines give " + std::to_string(matrix.df_max(name)));
    }
  }
  try {
    return ServiceDirectory(std::move(matrix), std::move(profiles), params);
  } catch (const Error& e) {
    corrupt(0, e.what());
  }
}

void save_index(const ServiceDirectory& directory, const std::filesystem::path& path) {
  const auto text = format_index(directory);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write index '" + path.string() + "'");
    out << text;
    if (!out.flush()) throw Error(ErrorCode::io_error, "write failure on '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io_error, "cannot replace index '" + path.string() + "'");
  }
}

ServiceDirectory load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read index '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_index(buf.str());
}

}  // namespace fedsel

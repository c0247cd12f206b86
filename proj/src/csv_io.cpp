#include "winkler/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace winkler {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& raw, std::size_t line_no,
                    const std::string& column) {
  const std::string text = trim(raw);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw validation_error("line " + std::to_string(line_no) + ": cannot parse '" +
                           raw + "' as a number for column '" + column + "'");
  }
  return value;
}

}  // namespace

CsvRecordSet read_record_set(std::istream& in, const std::string& group_col,
                             bool allow_degenerate) {
  std::string line;
  if (!std::getline(in, line)) {
    throw validation_error("empty input: a header line is required");
  }
  const std::vector<std::string> header = split_csv_line(line);
  int lower_idx = -1, upper_idx = -1, observed_idx = -1, group_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name == "lower") lower_idx = static_cast<int>(i);
    else if (name == "upper") upper_idx = static_cast<int>(i);
    else if (name == "observed") observed_idx = static_cast<int>(i);
    else if (!group_col.empty() && name == group_col) group_idx = static_cast<int>(i);
  }
  if (lower_idx < 0 || upper_idx < 0 || observed_idx < 0) {
    throw validation_error(
        "header must contain the columns lower, upper and observed");
  }
  if (!group_col.empty() && group_idx < 0) {
    throw validation_error("header does not contain the group column '" +
                           group_col + "'");
  }

  CsvRecordSet set;
  set.has_group = group_idx >= 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw validation_error("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
    }
    CsvRecord rec;
    rec.interval.lower = parse_number(fields[lower_idx], line_no, "lower");
    rec.interval.upper = parse_number(fields[upper_idx], line_no, "upper");
    rec.observed = parse_number(fields[observed_idx], line_no, "observed");
    if (!std::isfinite(rec.observed)) {
      throw validation_error("line " + std::to_string(line_no) +
                             ": observed value must be finite");
    }
    try {
      validate_interval(rec.interval, allow_degenerate);
    } catch (const validation_error& err) {
      throw validation_error("line " + std::to_string(line_no) + ": " +
                             err.what());
    }
    if (group_idx >= 0) {
      rec.group = trim(fields[group_idx]);
    }
    set.records.push_back(std::move(rec));
  }
  if (set.records.empty()) {
    throw validation_error("no data rows after the header");
  }
  return set;
}

CsvRecordSet read_record_set_file(const std::filesystem::path& path,
                                  const std::string& group_col,
                                  bool allow_degenerate) {
  std::ifstream in(path);
  if (!in) {
    throw validation_error("cannot open '" + path.string() + "' for reading");
  }
  return read_record_set(in, group_col, allow_degenerate);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) {
    throw internal_error("number formatting failed");
  }
  return std::string(buf, ptr);
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw validation_error("cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw validation_error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw validation_error("failed to move '" + tmp.string() + "' onto '" +
                           path.string() + "': " + ec.message());
  }
}

}  // namespace winkler

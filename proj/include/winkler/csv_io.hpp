#ifndef WINKLER_CSV_IO_HPP
#define WINKLER_CSV_IO_HPP

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "winkler/scoring.hpp"

namespace winkler {

/// One parsed CSV row: an interval, its outcome, and the optional group
/// tag for multi-method files.
struct CsvRecord {
  Interval interval;
  double observed = 0.0;
  std::string group;
};

struct CsvRecordSet {
  std::vector<CsvRecord> records;
  bool has_group = false;
};

/// Reads `lower,upper,observed[,<group_col>]` with a mandatory header.
/// Columns are matched by name, the decimal separator is always '.',
/// and errors cite 1-based line numbers. Interval validity is enforced
/// row by row.
CsvRecordSet read_record_set(std::istream& in, const std::string& group_col = "",
                             bool allow_degenerate = false);
CsvRecordSet read_record_set_file(const std::filesystem::path& path,
                                  const std::string& group_col = "",
                                  bool allow_degenerate = false);

/// Shortest round-trip decimal rendering (std::to_chars).
std::string format_double(double x);

/// Writes via a sibling temp file followed by an atomic rename.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace winkler

#endif  // WINKLER_CSV_IO_HPP

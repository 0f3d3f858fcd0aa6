#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace alm::csv {

// Shortest decimal that parses back to the same double.
std::string format_real(double value);

// Strict parse of a full field; throws ParseError on trailing junk.
double parse_real(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Data row i came from file line line_numbers[i] (1-based).
  std::vector<std::size_t> line_numbers;

  // Index of the column whose name equals `name`, or -1.
  long find(std::string_view name) const;
};

// Comma-delimited, header row required, double-quoted fields allowed. Throws
// ParseError on an empty stream or ragged rows.
Table read(std::istream& in);
Table read_file(const std::string& path);

std::string join(const std::vector<std::string>& fields);

}  // namespace alm::csv

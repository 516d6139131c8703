#pragma once

#include "cedtest/errors.hpp"
#include "cedtest/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cedtest::csv {

// Malformed or unusable CSV content; messages name the row and column.
class ParseError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Raw comma-delimited table. Fields may be wrapped in double quotes.
struct Table {
  std::vector<std::string> header;             // empty when the file has none
  std::vector<std::vector<std::string>> rows;  // data rows in file order
  std::size_t first_data_line = 1;             // 1-based line number of rows[0]
};

Table read_table(const std::filesystem::path& path, bool has_header);
Table parse_table(const std::string& text, bool has_header);

// Column references are header names, or 0-based indices when the table
// has no header (or no header field matches).
std::size_t resolve_column(const Table& table, const std::string& ref);

// Numeric block of the selected columns. Rejects non-numeric and
// non-finite cells with the offending row (1-based file line) and column.
Matrix numeric_columns(const Table& table, const std::vector<std::string>& refs);

struct CsvSampleSpec {
  std::filesystem::path path;
  std::vector<std::string> y_cols;
  std::vector<std::string> x_cols;
  bool has_header = true;
};

Sample parse_csv_sample(const CsvSampleSpec& spec);

}  // namespace cedtest::csv

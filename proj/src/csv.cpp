#include "cedtest/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cedtest::csv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field on line " + std::to_string(line_no));
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

}  // namespace

Table parse_table(const std::string& text, bool has_header) {
  Table table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_done = !has_header;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_line(line, line_no);
    if (!header_done) {
      table.header = std::move(fields);
      width = table.header.size();
      header_done = true;
      continue;
    }
    if (table.rows.empty()) {
      table.first_data_line = line_no;
      if (width == 0) width = fields.size();
    }
    if (fields.size() != width) {
      throw ParseError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(width));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

Table read_table(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open CSV file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str(), has_header);
}

std::size_t resolve_column(const Table& table, const std::string& ref) {
  const auto it = std::find(table.header.begin(), table.header.end(), ref);
  if (it != table.header.end()) return static_cast<std::size_t>(it - table.header.begin());
  const std::size_t width =
      !table.header.empty() ? table.header.size() : (table.rows.empty() ? 0 : table.rows[0].size());
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), idx);
  if (ec == std::errc() && ptr == ref.data() + ref.size() && idx < width) return idx;
  throw ParseError("column '" + ref + "' not found");
}

Matrix numeric_columns(const Table& table, const std::vector<std::string>& refs) {
  std::vector<std::size_t> cols;
  cols.reserve(refs.size());
  for (const auto& r : refs) cols.push_back(resolve_column(table, r));
  Matrix out(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string& cell = table.rows[i][cols[c]];
      double v = 0.0;
      const std::size_t line = table.first_data_line + i;
      if (!parse_double(cell, v)) {
        throw ParseError("non-numeric value '" + cell + "' at row " + std::to_string(line) +
                         ", column '" + refs[c] + "'");
      }
      if (!std::isfinite(v)) {
        throw ParseError("non-finite value '" + cell + "' at row " + std::to_string(line) +
                         ", column '" + refs[c] + "'");
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return out;
}

Sample parse_csv_sample(const CsvSampleSpec& spec) {
  if (spec.y_cols.empty() || spec.x_cols.empty()) {
    throw ParseError("both response and covariate columns must be selected");
  }
  const Table table = read_table(spec.path, spec.has_header);
  std::set<std::size_t> ys;
  for (const auto& r : spec.y_cols) ys.insert(resolve_column(table, r));
  for (const auto& r : spec.x_cols) {
    if (ys.count(resolve_column(table, r)) != 0) {
      throw ParseError("column '" + r + "' is selected as both response and covariate");
    }
  }
  if (table.rows.empty()) throw ParseError("'" + spec.path.string() + "' contains no data rows");
  return Sample(numeric_columns(table, spec.y_cols), numeric_columns(table, spec.x_cols));
}

}  // namespace cedtest::csv

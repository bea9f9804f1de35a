#include "sumtdp/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace sumtdp {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

NumericTable read_numeric_table(std::istream& in, const std::string& source) {
  NumericTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (blank(line)) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw InputError(source + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      double x = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), x);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw InputError(source + ":" + std::to_string(lineno) + ":" + std::to_string(c + 1) +
                         ": not a number: '" + f + "'");
      }
      table.values.push_back(x);
    }
    ++table.rows;
  }
  if (!have_header) throw InputError(source + ": empty input, expected a header row");
  if (table.rows == 0) throw InputError(source + ": no data rows after the header");
  return table;
}

NumericTable read_numeric_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_numeric_table(in, path);
}

StatisticMatrix read_statistic_matrix(std::istream& in, const std::string& source) {
  auto t = read_numeric_table(in, source);
  const std::size_t cols = t.header.size();
  try {
    return StatisticMatrix(t.rows, cols, std::move(t.values), std::move(t.header));
  } catch (const std::invalid_argument& e) {
    throw InputError(source + ": " + e.what());
  }
}

StatisticMatrix read_statistic_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_statistic_matrix(in, path);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_statistic_matrix(std::ostream& out, const StatisticMatrix& stats) {
  const auto& names = stats.names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (std::size_t r = 0; r < stats.b_count(); ++r) {
    const auto row = stats.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

}  // namespace sumtdp

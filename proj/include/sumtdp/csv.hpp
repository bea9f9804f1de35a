#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sumtdp/statmatrix.hpp"

namespace sumtdp {

/// Malformed tabular input; the message carries line/column context.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numeric table with a header row: every data row must have as many
/// fields as the header. Decimal point is always '.', independent of locale.
struct NumericTable {
  std::vector<std::string> header;
  std::size_t rows = 0;
  std::vector<double> values;  // row-major, rows x header.size()
};

NumericTable read_numeric_table(std::istream& in, const std::string& source = "<input>");
NumericTable read_numeric_table_file(const std::string& path);

/// First data row = observed statistics, following rows = transformed ones.
StatisticMatrix read_statistic_matrix(std::istream& in, const std::string& source = "<input>");
StatisticMatrix read_statistic_matrix_file(const std::string& path);
void write_statistic_matrix(std::ostream& out, const StatisticMatrix& stats);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

}  // namespace sumtdp

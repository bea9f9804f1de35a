#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sumtdp/rng.hpp"
#include "sumtdp/statmatrix.hpp"

namespace sumtdp {

/// n x m matrix of observations (rows = subjects, columns = variables).
class RawData {
public:
  RawData(std::size_t n, std::size_t m, std::vector<double> values);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * m_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * m_ + c]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * m_, m_}; }
  const std::vector<double>& values() const { return values_; }

private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> values_;
};

enum class Sidedness { TwoSided, Signed };

enum class SchemeKind { SignFlip, RowPermutation };

struct TransformationScheme {
  SchemeKind kind = SchemeKind::SignFlip;
  std::size_t b_count = 200;
  std::uint64_t seed = 0;
};

/// Per-column statistic evaluated on (transformed) data.
using ColumnStatistic = std::function<std::vector<double>(const RawData&)>;

/// One-sample t statistic per column: |t| when two-sided, t otherwise.
/// Throws std::domain_error naming the first zero-variance column.
std::vector<double> one_sample_t(const RawData& data, Sidedness side = Sidedness::TwoSided);

/// Welch two-sample t statistic per column, rows [0, n_first) versus the rest.
std::vector<double> two_sample_t(const RawData& data, std::size_t n_first,
                                 Sidedness side = Sidedness::TwoSided);

/// The B transformations actually drawn: sign vectors for SignFlip, row
/// orders for RowPermutation. Entry 0 is always the identity.
struct DrawnTransformations {
  std::vector<std::vector<int>> signs;
  std::vector<std::vector<std::size_t>> orders;
};

DrawnTransformations draw_transformations(std::size_t n, const TransformationScheme& scheme);

/// Applies the transformation in slot `b` of `drawn` to `data`.
RawData transform(const RawData& data, const DrawnTransformations& drawn, std::size_t b);

/// Builds the B x m statistic matrix: row 0 from the untouched data, row b
/// from the data under the b-th drawn transformation. Sign flips act on whole
/// observation rows so that cross-column dependence is preserved.
StatisticMatrix transformed_statistics(const RawData& data, const TransformationScheme& scheme,
                                       const ColumnStatistic& stat);

/// transformed_statistics restricted to SignFlip schemes.
StatisticMatrix sign_flip_matrix(const RawData& data, const TransformationScheme& scheme,
                                 const ColumnStatistic& stat);

/// Validates p-values in (0, 1]; orientation is left to the combiners.
std::vector<double> p_to_statistic(std::span<const double> pvalues);

}  // namespace sumtdp

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sumtdp {

using Index = std::size_t;

/// Sorted, duplicate-free list of 0-based hypothesis indices.
using IndexSet = std::vector<Index>;

/// Sorts and deduplicates `indices`; throws if any index is >= `m`.
IndexSet make_index_set(std::vector<Index> indices, std::size_t m);

/// B x m matrix of per-hypothesis statistics. Row 0 holds the observed
/// statistics (identity transformation), rows 1..B-1 the transformed ones.
/// Larger values are evidence against the hypothesis.
class StatisticMatrix {
public:
  StatisticMatrix() = default;
  StatisticMatrix(std::size_t b_count, std::size_t hyp_count, std::vector<double> values,
                  std::vector<std::string> names = {});

  std::size_t b_count() const { return b_; }
  std::size_t hyp_count() const { return m_; }

  double operator()(std::size_t row, std::size_t col) const { return values_[row * m_ + col]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * m_, m_}; }
  std::span<const double> observed() const { return row(0); }
  const std::vector<double>& values() const { return values_; }

  /// Hypothesis identifiers; defaults to "H1".."Hm".
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const StatisticMatrix&) const = default;

private:
  std::size_t b_ = 0;
  std::size_t m_ = 0;
  std::vector<double> values_;
  std::vector<std::string> names_;
};

/// Centered statistics C(pi, i) = T_i - T_i^pi. Row 0 is identically zero.
/// The observed statistics are kept alongside because the search heuristics
/// (greedy path, branching pivot) order hypotheses by them.
class CenteredMatrix {
public:
  CenteredMatrix() = default;

  std::size_t b_count() const { return b_; }
  std::size_t hyp_count() const { return m_; }

  double operator()(std::size_t row, std::size_t col) const { return values_[row * m_ + col]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * m_, m_}; }
  std::span<const double> observed() const { return observed_; }

private:
  friend CenteredMatrix center(const StatisticMatrix& stats);

  std::size_t b_ = 0;
  std::size_t m_ = 0;
  std::vector<double> values_;
  std::vector<double> observed_;
};

/// Significance level together with the order-statistic indices it implies
/// for a given number of transformations.
class TestConfig {
public:
  TestConfig(double alpha, std::size_t b_count);

  double alpha() const { return alpha_; }
  std::size_t b_count() const { return b_; }
  /// ceil(alpha * B), 1-based rank of the centered quantile; 0 when B < 1/alpha.
  std::size_t omega() const { return omega_; }
  /// ceil((1 - alpha) * B), 1-based rank of the classical critical value.
  std::size_t omega0() const { return omega0_; }
  /// False when B < 1/alpha.
  bool has_power() const { return alpha_ * static_cast<double>(b_) >= 1.0 - 1e-9; }

private:
  double alpha_;
  std::size_t b_;
  std::size_t omega_;
  std::size_t omega0_;
};

CenteredMatrix center(const StatisticMatrix& stats);

/// k-th smallest (1-based) element of `values`; the span is reordered.
double kth_smallest(std::span<double> values, std::size_t k);

/// omega-th smallest centered sum over the rows, for the columns in `subset`.
double subset_quantile(const CenteredMatrix& centered, const IndexSet& subset, const TestConfig& cfg);

/// True iff the permutation test rejects the intersection hypothesis of `subset`.
bool reject(const CenteredMatrix& centered, const IndexSet& subset, const TestConfig& cfg);

}  // namespace sumtdp

#include "sumtdp/statmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sumtdp {

IndexSet make_index_set(std::vector<Index> indices, std::size_t m) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (!indices.empty() && indices.back() >= m) {
    throw std::out_of_range("hypothesis index " + std::to_string(indices.back() + 1) +
                            " exceeds m = " + std::to_string(m));
  }
  return indices;
}

StatisticMatrix::StatisticMatrix(std::size_t b_count, std::size_t hyp_count, std::vector<double> values,
                                 std::vector<std::string> names)
    : b_(b_count), m_(hyp_count), values_(std::move(values)), names_(std::move(names)) {
  if (b_ < 1 || m_ < 1) {
    throw std::invalid_argument("statistic matrix needs at least one row and one column");
  }
  if (values_.size() != b_ * m_) {
    throw std::invalid_argument("statistic matrix: expected " + std::to_string(b_ * m_) + " values, got " +
                                std::to_string(values_.size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw std::invalid_argument("statistic matrix: non-finite entry at row " + std::to_string(k / m_ + 1) +
                                  ", column " + std::to_string(k % m_ + 1));
    }
  }
  if (names_.empty()) {
    names_.reserve(m_);
    for (std::size_t i = 0; i < m_; ++i) names_.push_back("H" + std::to_string(i + 1));
  } else if (names_.size() != m_) {
    throw std::invalid_argument("statistic matrix: " + std::to_string(names_.size()) + " names for " +
                                std::to_string(m_) + " columns");
  }
}

TestConfig::TestConfig(double alpha, std::size_t b_count) : alpha_(alpha), b_(b_count) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
  if (b_count < 1) throw std::invalid_argument("need at least one transformation");
  // The tolerance absorbs products such as 0.05 * 200 landing a hair above an integer.
  const double b = static_cast<double>(b_count);
  omega_ = static_cast<std::size_t>(std::ceil(alpha * b - 1e-9));
  omega0_ = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
  omega_ = std::min(omega_, b_count);
  omega0_ = std::min(omega0_, b_count);
}

CenteredMatrix center(const StatisticMatrix& stats) {
  CenteredMatrix c;
  c.b_ = stats.b_count();
  c.m_ = stats.hyp_count();
  c.values_.resize(c.b_ * c.m_);
  const auto obs = stats.observed();
  c.observed_.assign(obs.begin(), obs.end());
  for (std::size_t r = 0; r < c.b_; ++r) {
    const auto row = stats.row(r);
    for (std::size_t i = 0; i < c.m_; ++i) c.values_[r * c.m_ + i] = obs[i] - row[i];
  }
  return c;
}

double kth_smallest(std::span<double> values, std::size_t k) {
  if (k < 1 || k > values.size()) throw std::out_of_range("order statistic rank out of range");
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double subset_quantile(const CenteredMatrix& centered, const IndexSet& subset, const TestConfig& cfg) {
  if (subset.empty()) throw std::domain_error("the empty intersection hypothesis is never tested");
  if (!cfg.has_power()) throw std::domain_error("B < 1/alpha: the centered quantile rank is zero");
  if (cfg.b_count() != centered.b_count()) {
    throw std::invalid_argument("test configuration built for a different number of transformations");
  }
  for (Index i : subset) {
    if (i >= centered.hyp_count()) throw std::out_of_range("subset index out of range");
  }
  std::vector<double> sums(centered.b_count(), 0.0);
  for (std::size_t r = 0; r < sums.size(); ++r) {
    const auto row = centered.row(r);
    double acc = 0.0;
    for (Index i : subset) acc += row[i];
    sums[r] = acc;
  }
  return kth_smallest(sums, cfg.omega());
}

bool reject(const CenteredMatrix& centered, const IndexSet& subset, const TestConfig& cfg) {
  if (subset.empty()) throw std::domain_error("the empty intersection hypothesis is never tested");
  if (!cfg.has_power()) return false;
  return subset_quantile(centered, subset, cfg) > 0.0;
}

}  // namespace sumtdp

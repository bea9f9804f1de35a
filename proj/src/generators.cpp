#include "sumtdp/generators.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sumtdp {

RawData::RawData(std::size_t n, std::size_t m, std::vector<double> values)
    : n_(n), m_(m), values_(std::move(values)) {
  if (n_ < 1 || m_ < 1) throw std::invalid_argument("raw data needs at least one row and one column");
  if (values_.size() != n_ * m_) throw std::invalid_argument("raw data: size does not match n x m");
  for (double x : values_) {
    if (!std::isfinite(x)) throw std::invalid_argument("raw data: non-finite entry");
  }
}

std::vector<double> one_sample_t(const RawData& data, Sidedness side) {
  const std::size_t n = data.n();
  if (n < 2) throw std::domain_error("one-sample t needs at least two observations");
  std::vector<double> mean(data.m(), 0.0), ss(data.m(), 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = data.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) mean[c] += row[c];
  }
  for (double& x : mean) x /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = data.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double d = row[c] - mean[c];
      ss[c] += d * d;
    }
  }
  std::vector<double> t(data.m());
  const double root_n = std::sqrt(static_cast<double>(n));
  for (std::size_t c = 0; c < t.size(); ++c) {
    const double sd = std::sqrt(ss[c] / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw std::domain_error("column " + std::to_string(c + 1) + " has zero variance");
    t[c] = mean[c] / (sd / root_n);
    if (side == Sidedness::TwoSided) t[c] = std::fabs(t[c]);
  }
  return t;
}

std::vector<double> two_sample_t(const RawData& data, std::size_t n_first, Sidedness side) {
  const std::size_t n = data.n();
  if (n_first < 2 || n - n_first < 2 || n_first >= n) {
    throw std::domain_error("two-sample t needs at least two observations per group");
  }
  const std::size_t m = data.m();
  std::vector<double> t(m);
  for (std::size_t c = 0; c < m; ++c) {
    double s1 = 0, s2 = 0;
    for (std::size_t r = 0; r < n_first; ++r) s1 += data(r, c);
    for (std::size_t r = n_first; r < n; ++r) s2 += data(r, c);
    const double n1 = static_cast<double>(n_first), n2 = static_cast<double>(n - n_first);
    const double m1 = s1 / n1, m2 = s2 / n2;
    double v1 = 0, v2 = 0;
    for (std::size_t r = 0; r < n_first; ++r) v1 += (data(r, c) - m1) * (data(r, c) - m1);
    for (std::size_t r = n_first; r < n; ++r) v2 += (data(r, c) - m2) * (data(r, c) - m2);
    const double se = std::sqrt(v1 / (n1 - 1) / n1 + v2 / (n2 - 1) / n2);
    if (!(se > 0.0)) throw std::domain_error("column " + std::to_string(c + 1) + " has zero variance");
    t[c] = (m1 - m2) / se;
    if (side == Sidedness::TwoSided) t[c] = std::fabs(t[c]);
  }
  return t;
}

DrawnTransformations draw_transformations(std::size_t n, const TransformationScheme& scheme) {
  if (scheme.b_count < 1) throw std::invalid_argument("need at least one transformation");
  Rng rng(scheme.seed);
  DrawnTransformations drawn;
  if (scheme.kind == SchemeKind::SignFlip) {
    drawn.signs.assign(scheme.b_count, std::vector<int>(n, 1));
    for (std::size_t b = 1; b < scheme.b_count; ++b) {
      for (auto& s : drawn.signs[b]) s = rng.sign();
    }
  } else {
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0);
    drawn.orders.assign(scheme.b_count, id);
    for (std::size_t b = 1; b < scheme.b_count; ++b) {
      auto& o = drawn.orders[b];
      for (std::size_t k = n; k > 1; --k) std::swap(o[k - 1], o[rng.below(k)]);
    }
  }
  return drawn;
}

RawData transform(const RawData& data, const DrawnTransformations& drawn, std::size_t b) {
  RawData out = data;
  if (!drawn.signs.empty()) {
    const auto& s = drawn.signs.at(b);
    for (std::size_t r = 0; r < data.n(); ++r) {
      if (s[r] == 1) continue;
      for (std::size_t c = 0; c < data.m(); ++c) out(r, c) = -data(r, c);
    }
  } else {
    const auto& o = drawn.orders.at(b);
    for (std::size_t r = 0; r < data.n(); ++r) {
      for (std::size_t c = 0; c < data.m(); ++c) out(r, c) = data(o[r], c);
    }
  }
  return out;
}

StatisticMatrix transformed_statistics(const RawData& data, const TransformationScheme& scheme,
                                       const ColumnStatistic& stat) {
  const auto drawn = draw_transformations(data.n(), scheme);
  std::vector<double> values;
  values.reserve(scheme.b_count * data.m());
  for (std::size_t b = 0; b < scheme.b_count; ++b) {
    const auto row = b == 0 ? stat(data) : stat(transform(data, drawn, b));
    if (row.size() != data.m()) throw std::invalid_argument("statistic returned the wrong number of columns");
    values.insert(values.end(), row.begin(), row.end());
  }
  return StatisticMatrix(scheme.b_count, data.m(), std::move(values));
}

StatisticMatrix sign_flip_matrix(const RawData& data, const TransformationScheme& scheme,
                                 const ColumnStatistic& stat) {
  if (scheme.kind != SchemeKind::SignFlip) throw std::invalid_argument("sign_flip_matrix needs a SignFlip scheme");
  return transformed_statistics(data, scheme, stat);
}

std::vector<double> p_to_statistic(std::span<const double> pvalues) {
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    if (!(pvalues[i] > 0.0 && pvalues[i] <= 1.0)) {
      throw std::domain_error("p-value " + std::to_string(i + 1) + " outside (0, 1]");
    }
  }
  return {pvalues.begin(), pvalues.end()};
}

}  // namespace sumtdp

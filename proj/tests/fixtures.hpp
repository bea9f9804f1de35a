#pragma once

#include <cstdint>
#include <vector>

#include "sumtdp/rng.hpp"
#include "sumtdp/statmatrix.hpp"

namespace fixtures {

// The recurring 5-hypothesis example, B = 6, alpha = 0.4.
inline sumtdp::StatisticMatrix toy() {
  return sumtdp::StatisticMatrix(6, 5, {6, 5, 4, 1, 1,  //
                                        1, 2, 1, 0, 4,  //
                                        8, 3, 0, 2, 1,  //
                                        8, 1, 0, 1, 0,  //
                                        0, 6, 1, 1, 2,  //
                                        7, 0, 1, 2, 1});
}

// The same example after truncation at 2 with ground value 0.
inline sumtdp::StatisticMatrix toy_truncated() {
  return sumtdp::StatisticMatrix(6, 5, {6, 5, 4, 0, 0,  //
                                        0, 2, 0, 0, 4,  //
                                        8, 3, 0, 2, 0,  //
                                        8, 0, 0, 0, 0,  //
                                        0, 6, 0, 0, 2,  //
                                        7, 0, 0, 2, 0});
}

struct Instance {
  sumtdp::StatisticMatrix stats;
  double alpha;
};

// Random statistic matrix whose entries are multiples of 1/256 (or small
// integers, when `integer` is set), so every subset sum is exact in double
// precision and comparisons with brute force are free of rounding. Roughly
// 40% of the columns get a shifted observed value.
inline sumtdp::StatisticMatrix random_stats(sumtdp::Rng& rng, std::size_t m, std::size_t b, bool integer) {
  std::vector<double> v(b * m);
  const auto draw = [&](double hi) {
    if (integer) return static_cast<double>(rng.below(static_cast<std::uint64_t>(hi) + 1));
    return static_cast<double>(rng.below(static_cast<std::uint64_t>(hi * 256) + 1)) / 256.0;
  };
  for (std::size_t c = 0; c < m; ++c) {
    const bool active = rng.uniform() < 0.4;
    for (std::size_t r = 0; r < b; ++r) v[r * m + c] = draw(6.0) + (r == 0 && active ? draw(5.0) : 0.0);
  }
  return sumtdp::StatisticMatrix(b, m, std::move(v));
}

inline Instance random_instance(std::uint64_t seed, std::size_t m_lo, std::size_t m_hi, std::size_t b_lo,
                                std::size_t b_hi) {
  sumtdp::Rng rng(seed);
  const std::size_t m = m_lo + rng.below(m_hi - m_lo + 1);
  const std::size_t b = b_lo + rng.below(b_hi - b_lo + 1);
  static constexpr double alphas[] = {0.05, 0.2, 0.4};
  const double alpha = alphas[rng.below(3)];
  return {random_stats(rng, m, b, rng.below(2) == 0), alpha};
}

inline sumtdp::IndexSet random_subset(sumtdp::Rng& rng, std::size_t m) {
  sumtdp::IndexSet s;
  while (s.empty()) {
    for (std::size_t i = 0; i < m; ++i) {
      if (rng.below(2)) s.push_back(i);
    }
  }
  return s;
}

inline std::vector<sumtdp::IndexSet> all_subsets(std::size_t m) {
  std::vector<sumtdp::IndexSet> out;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    sumtdp::IndexSet s;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1u) s.push_back(i);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fixtures

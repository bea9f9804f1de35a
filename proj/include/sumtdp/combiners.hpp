#pragma once

#include <functional>
#include <limits>
#include <string>

#include "sumtdp/statmatrix.hpp"

namespace sumtdp {

enum class CombinerKind { Identity, Fisher, Pearson, Liptak, Edgington, Cauchy, GeneralizedMean, Custom };

/// Per-hypothesis transform turning a p-value (or a raw statistic, for
/// Identity/Custom) into a summable contribution. Every p-value transform is
/// strictly decreasing in p, so larger contributions mean more evidence.
///
///   Fisher            -log p
///   Pearson           log(1 - p)          (sign flipped from -log(1 - p))
///   Liptak            Phi^{-1}(1 - p)
///   Edgington         -p
///   Cauchy            tan((0.5 - p) pi)
///   GeneralizedMean r p^r for r < 0, -p^r for r > 0, Fisher for r = 0
///
/// Transforms that diverge at p = 1 evaluate at 1 - 2^-52 instead.
struct Combiner {
  CombinerKind kind = CombinerKind::Identity;
  double r = 0.0;
  std::function<double(double)> custom;

  static Combiner identity() { return {}; }
  static Combiner of(CombinerKind k) { return {k, 0.0, {}}; }
  static Combiner generalized_mean(double r) { return {CombinerKind::GeneralizedMean, r, {}}; }

  /// True when inputs are p-values and must lie in (0, 1].
  bool takes_pvalues() const { return kind != CombinerKind::Identity && kind != CombinerKind::Custom; }

  double operator()(double x) const;
  std::string name() const;
};

/// Parses "fisher|pearson|liptak|edgington|cauchy|vw:<r>|identity".
Combiner parse_combiner(const std::string& text);

StatisticMatrix apply_combiner(const StatisticMatrix& stats, const Combiner& c);

/// Entries below t_star are replaced by the ground value t_ring.
struct TruncationRule {
  double t_star = -std::numeric_limits<double>::infinity();
  double t_ring = 0.0;
};

StatisticMatrix truncate(const StatisticMatrix& stats, const TruncationRule& rule);

/// k-th greatest entry (1-based) over the whole matrix.
double threshold_from_rank(const StatisticMatrix& stats, std::size_t k);

}  // namespace sumtdp

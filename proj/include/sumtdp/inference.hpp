#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sumtdp/branchbound.hpp"
#include "sumtdp/combiners.hpp"
#include "sumtdp/reduction.hpp"

namespace sumtdp {

struct DiscoveryBound {
  IndexSet set;
  std::size_t s = 0;
  std::size_t q_bar = 0;
  std::size_t d = 0;
  double tdp = 0.0;
  /// True when every phi verdict met by the bisection was definite, so that
  /// d is the exact closed-testing value.
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t phi_evaluations = 0;
  /// (z, verdict) for each bisection step, in order.
  std::vector<std::pair<std::size_t, Verdict>> steps;
  /// Columns of the problem actually searched (after any reduction).
  std::size_t m_effective = 0;
};

struct BisectionResult {
  std::size_t q_bar = 0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Bisection for the change point of phi on {0..s+1}, with phi(0) = 0 and
/// phi(s+1) = 1 taken as known. Unsure verdicts count as 0, so q_bar never
/// falls below the true change point.
BisectionResult binary_search_q(const std::function<Verdict(std::size_t)>& phi, std::size_t s);

enum class BudgetMode {
  /// Every phi evaluation gets the full h_max.
  PerEvaluation,
  /// h_max is split over the bisection steps; unused units roll over.
  Shared,
};

const char* to_string(BudgetMode mode);
BudgetMode parse_budget_mode(const std::string& text);

DiscoveryBound discoveries(const CenteredMatrix& centered, const IndexSet& query, const TestConfig& cfg,
                           const BranchBudget& budget, BudgetMode mode = BudgetMode::PerEvaluation);

/// Maps a bound computed on a reduced problem back to the original query.
DiscoveryBound lift(DiscoveryBound bound, const ReducedProblem& red);

struct EngineOptions {
  BranchBudget budget;
  BudgetMode mode = BudgetMode::PerEvaluation;
  /// Applies reduction per query; meaningful only for truncated statistics.
  bool reduce = false;
  double t_ring = 0.0;
  std::size_t threads = 1;
};

/// d(S) for arbitrary query sets over one statistic matrix (already combined
/// and, when requested, truncated).
class DiscoveryEngine {
public:
  DiscoveryEngine(StatisticMatrix stats, double alpha, EngineOptions options = {});

  const StatisticMatrix& statistics() const { return stats_; }
  const TestConfig& config() const { return cfg_; }
  const EngineOptions& options() const { return options_; }
  const CenteredMatrix& centered() const { return centered_; }

  DiscoveryBound discover(const IndexSet& query) const;

private:
  StatisticMatrix stats_;
  TestConfig cfg_;
  EngineOptions options_;
  CenteredMatrix centered_;
};

struct QueryOutcome {
  std::optional<DiscoveryBound> bound;
  std::string error;
};

/// One bound per query, computed concurrently on up to options().threads
/// workers. A failing query is reported in its own entry.
std::vector<QueryOutcome> simultaneous_report(const DiscoveryEngine& engine, const std::vector<IndexSet>& queries);

/// Indices of S_1 c S_2 c ... c S_m given as a permutation of 0..m-1.
struct NestedQuery {
  std::vector<Index> ordering;
  double gamma = 0.0;
};

struct LargestSubset {
  std::size_t size = 0;
  std::size_t d = 0;
  double tdp = 0.0;
  std::size_t searches = 0;
};

/// Greatest s with d(S_s)/s >= gamma, or 0 when there is none.
LargestSubset largest_subset(const NestedQuery& nested, const std::function<DiscoveryBound(const IndexSet&)>& d_of);
LargestSubset largest_subset(const NestedQuery& nested, const DiscoveryEngine& engine);

}  // namespace sumtdp

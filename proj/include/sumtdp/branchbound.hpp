#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>

#include "sumtdp/shortcut.hpp"

namespace sumtdp {

/// Maximum number of branching steps after the root evaluation.
struct BranchBudget {
  std::size_t h_max = 50;

  static BranchBudget unlimited() { return {std::numeric_limits<std::size_t>::max()}; }
  bool is_unlimited() const { return h_max == std::numeric_limits<std::size_t>::max(); }
};

/// The free index with the greatest observed statistic outside the reserved
/// part of S (ties: highest index, i.e. the last entry of the path order).
/// Empty when the subspace holds at most one set.
std::optional<Index> pick_pivot(const Subspace& sub, std::span<const double> observed, const IndexSet& query,
                                std::size_t z);

/// (exclude pivot, force pivot). Both children keep the parent's window.
std::pair<Subspace, Subspace> branch(const Subspace& sub, Index pivot, const IndexSet& query, std::size_t z,
                                     std::size_t m);

struct IterativeResult {
  Verdict value = Verdict::Unsure;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  IndexSet witness;
};

/// Called after each single-step evaluation with the subspace just examined.
using BranchObserver = std::function<void(const Subspace&, const PhiVerdict&)>;

/// Depth-first branch and bound on V_z. Exclusion children are explored
/// first without the path; popped inclusion children are evaluated with it.
/// The root evaluation is not charged against the budget.
IterativeResult evaluate_phi_iterative(const CenteredMatrix& centered, const IndexSet& query, std::size_t z,
                                       const BranchBudget& budget, const TestConfig& cfg,
                                       const BranchObserver& observer = {});

}  // namespace sumtdp

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sumtdp/statmatrix.hpp"

namespace sumtdp {

/// A sub-collection of V_z = {V : |V ∩ S| >= z}: every member contains all of
/// `forced` and none of `excluded`. The window [v_lo, v_hi] lists the set
/// sizes that are still unresolved; sizes outside it are already known to be
/// fully rejected.
struct Subspace {
  IndexSet forced;
  IndexSet excluded;
  std::size_t v_lo = 0;
  std::size_t v_hi = std::numeric_limits<std::size_t>::max();
};

enum class Verdict { Zero, One, Unsure };

const char* to_string(Verdict v);

/// Outcome of one shortcut evaluation of phi(z) on a subspace.
struct PhiVerdict {
  Verdict value = Verdict::Unsure;
  /// Sizes still unresolved (meaningful when value == Unsure).
  std::size_t v_lo = 0;
  std::size_t v_hi = 0;
  /// A non-rejected member of the subspace (when value == Zero).
  IndexSet witness;
  std::size_t bound_evaluations = 0;
  std::size_t path_evaluations = 0;
};

/// Greedy ordering used by the path: the `reserved` indices are the
/// smallest observed statistics among the free members of S (as many as the
/// subspace still needs from S), `remainder` lists every other free index in
/// ascending observed order. Ties are broken by ascending column index, so
/// the last remainder entry is the branching pivot.
struct PathOrder {
  IndexSet forced;
  std::vector<Index> reserved;
  std::vector<Index> remainder;
};

PathOrder path_order(std::span<const double> observed, const IndexSet& query, std::size_t z,
                     const Subspace& sub);

/// Per-subspace tables behind the bound l_z(v) and the path u_z(v).
///
/// For every transformation pi the smallest admissible centered sum of each
/// size v is formed from the forced columns, the z' smallest free columns in
/// S, and then the smallest remaining free columns; prefix sums over that
/// order give b_v^pi for all v at once. The bound is the omega-th smallest
/// b_v^pi. The path uses one fixed order (PathOrder) for all pi and returns
/// the quantile of the resulting nested sets.
///
/// Sizes are total set sizes, v in [min_size(), max_size()].
class BoundPathWorkspace {
public:
  BoundPathWorkspace(const CenteredMatrix& centered, const IndexSet& query, std::size_t z, const Subspace& sub,
                     const TestConfig& cfg);

  /// True when the subspace contains no set at all.
  bool empty() const { return empty_; }
  bool single_set() const { return !empty_ && width_ == 0; }
  std::size_t min_size() const { return base_; }
  std::size_t max_size() const { return base_ + width_; }
  /// Number of members of S a set must still draw from the free columns.
  std::size_t needed_from_query() const { return needed_; }

  double bound(std::size_t v);
  double path(std::size_t v);
  IndexSet path_set(std::size_t v) const;

  /// (c1, c2): the bound is nonincreasing on [min_size, c1] and
  /// nondecreasing on [c2, max_size].
  std::pair<std::size_t, std::size_t> shape_indices() const { return {c1_, c2_}; }

  const PathOrder& order() const { return order_; }

private:
  void build_path();
  double column_quantile(const std::vector<double>& prefix, std::size_t h);

  const CenteredMatrix& centered_;
  std::size_t omega_;
  std::size_t b_;
  bool empty_ = false;
  std::size_t needed_ = 0;
  std::size_t base_ = 0;
  std::size_t width_ = 0;
  std::size_t c1_ = 0;
  std::size_t c2_ = 0;
  PathOrder order_;
  std::vector<double> bound_prefix_;  // b x (width + 1)
  std::vector<double> path_prefix_;   // b x (width + 1), built on first use
  std::vector<double> scratch_;
};

/// Single-step shortcut for phi(z) restricted to `sub`, scanning only the
/// window of `sub`. Returns One when the bound is positive at every window
/// size, Zero when some path set (or the single member of a degenerate
/// subspace) is not rejected, and Unsure otherwise with the narrowed window.
/// The path is evaluated only when `want_path` is set.
PhiVerdict evaluate_phi(const CenteredMatrix& centered, const IndexSet& query, std::size_t z, const Subspace& sub,
                        bool want_path, const TestConfig& cfg);

/// Full l_z / u_z table for the root subspace, for audit output.
struct BoundPathRow {
  std::size_t size;
  double bound;
  double path;
};

std::vector<BoundPathRow> bound_path_table(const CenteredMatrix& centered, const IndexSet& query, std::size_t z,
                                           const TestConfig& cfg);

}  // namespace sumtdp

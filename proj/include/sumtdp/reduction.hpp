#pragma once

#include <cstddef>
#include <vector>

#include "sumtdp/statmatrix.hpp"

namespace sumtdp {

/// A truncated problem shrunk for one query set S. Columns outside S whose
/// transformed values all sit at the ground value are dropped; columns
/// outside S whose observed value sits at the ground value are summed into
/// a single trailing column.
struct ReducedProblem {
  StatisticMatrix matrix;
  /// Original columns behind each reduced column.
  std::vector<IndexSet> kept_map;
  IndexSet removed;
  IndexSet collapsed;
  /// S in reduced coordinates, and as given.
  IndexSet query;
  IndexSet original_query;

  std::size_t m_prime() const { return matrix.hyp_count(); }
};

/// `stats` must already be truncated with ground value `t_ring`; the test for
/// both conditions is exact equality with it.
ReducedProblem reduce(const StatisticMatrix& stats, const IndexSet& query, double t_ring);

}  // namespace sumtdp

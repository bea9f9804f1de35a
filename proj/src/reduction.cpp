#include "sumtdp/reduction.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sumtdp {

ReducedProblem reduce(const StatisticMatrix& stats, const IndexSet& query, double t_ring) {
  const std::size_t b = stats.b_count(), m = stats.hyp_count();
  if (query.empty()) throw std::domain_error("query set must be nonempty");
  if (query.back() >= m) throw std::out_of_range("query index out of range");

  ReducedProblem red;
  red.original_query = query;
  std::vector<Index> kept;
  for (Index i = 0; i < m; ++i) {
    if (std::binary_search(query.begin(), query.end(), i)) {
      red.query.push_back(kept.size());
      kept.push_back(i);
      continue;
    }
    bool flat = true;
    for (std::size_t r = 1; r < b && flat; ++r) flat = stats(r, i) == t_ring;
    if (flat) {
      red.removed.push_back(i);
    } else if (stats(0, i) == t_ring) {
      red.collapsed.push_back(i);
    } else {
      kept.push_back(i);
    }
  }

  const std::size_t width = kept.size() + (red.collapsed.empty() ? 0 : 1);
  std::vector<double> values;
  values.reserve(b * width);
  for (std::size_t r = 0; r < b; ++r) {
    for (Index i : kept) values.push_back(stats(r, i));
    if (!red.collapsed.empty()) {
      double sum = 0.0;
      for (Index i : red.collapsed) sum += stats(r, i);
      values.push_back(sum);
    }
  }

  std::vector<std::string> names;
  for (Index i : kept) {
    names.push_back(stats.names()[i]);
    red.kept_map.push_back({i});
  }
  if (!red.collapsed.empty()) {
    std::string joined;
    for (Index i : red.collapsed) joined += (joined.empty() ? "" : "+") + stats.names()[i];
    names.push_back(joined);
    red.kept_map.push_back(red.collapsed);
  }
  red.matrix = StatisticMatrix(b, width, std::move(values), std::move(names));
  return red;
}

}  // namespace sumtdp

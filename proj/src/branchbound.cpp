#include "sumtdp/branchbound.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace sumtdp {
namespace {

IndexSet with(IndexSet set, Index i) {
  set.insert(std::upper_bound(set.begin(), set.end(), i), i);
  return set;
}

bool admits_sets(const Subspace& sub, const IndexSet& query, std::size_t z, std::size_t m) {
  std::size_t forced_in = 0, free_in = 0;
  for (Index i : query) {
    if (std::binary_search(sub.forced.begin(), sub.forced.end(), i)) {
      ++forced_in;
    } else if (!std::binary_search(sub.excluded.begin(), sub.excluded.end(), i)) {
      ++free_in;
    }
  }
  return forced_in + free_in >= z && sub.forced.size() + sub.excluded.size() <= m;
}

}  // namespace

std::optional<Index> pick_pivot(const Subspace& sub, std::span<const double> observed, const IndexSet& query,
                                std::size_t z) {
  const PathOrder order = path_order(observed, query, z, sub);
  if (order.remainder.empty()) return std::nullopt;
  return order.remainder.back();
}

std::pair<Subspace, Subspace> branch(const Subspace& sub, Index pivot, const IndexSet& query, std::size_t z,
                                     std::size_t m) {
  if (pivot >= m || std::binary_search(sub.forced.begin(), sub.forced.end(), pivot) ||
      std::binary_search(sub.excluded.begin(), sub.excluded.end(), pivot)) {
    throw std::logic_error("branching pivot is not free");
  }
  Subspace minus = sub, plus = sub;
  minus.excluded = with(sub.excluded, pivot);
  plus.forced = with(sub.forced, pivot);
  if (!admits_sets(minus, query, z, m) || !admits_sets(plus, query, z, m)) {
    throw std::logic_error("branching produced an empty subspace");
  }
  return {std::move(minus), std::move(plus)};
}

IterativeResult evaluate_phi_iterative(const CenteredMatrix& centered, const IndexSet& query, std::size_t z,
                                       const BranchBudget& budget, const TestConfig& cfg,
                                       const BranchObserver& observer) {
  IterativeResult out;
  const std::size_t m = centered.hyp_count();

  Subspace current;
  const auto run = [&](const Subspace& sub, bool want_path) {
    PhiVerdict v = evaluate_phi(centered, query, z, sub, want_path, cfg);
    ++out.evaluations;
    if (observer) observer(sub, v);
    return v;
  };
  const auto finish = [&](PhiVerdict& v) {
    out.value = v.value;
    out.witness = std::move(v.witness);
    return out;
  };

  PhiVerdict result = run(current, true);
  if (result.value != Verdict::Unsure) return finish(result);

  std::vector<Subspace> stack;
  std::size_t& h = out.iterations;
  while (h < budget.h_max) {
    while (result.value == Verdict::Unsure && h < budget.h_max) {
      ++h;
      current.v_lo = result.v_lo;
      current.v_hi = result.v_hi;
      const auto pivot = pick_pivot(current, centered.observed(), query, z);
      if (!pivot) throw std::logic_error("unsure verdict on a single-set subspace");
      auto [minus, plus] = branch(current, *pivot, query, z, m);
      stack.push_back(std::move(plus));
      current = std::move(minus);
      result = run(current, false);
      if (result.value == Verdict::Zero) return finish(result);
    }
    while (!stack.empty() && result.value == Verdict::One && h < budget.h_max) {
      ++h;
      current = std::move(stack.back());
      stack.pop_back();
      result = run(current, true);
      if (result.value == Verdict::Zero) return finish(result);
    }
    if (stack.empty() && result.value == Verdict::One) break;
  }

  out.value = stack.empty() && result.value == Verdict::One ? Verdict::One : Verdict::Unsure;
  return out;
}

}  // namespace sumtdp

#include "sumtdp/inference.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace sumtdp {

BisectionResult binary_search_q(const std::function<Verdict(std::size_t)>& phi, std::size_t s) {
  BisectionResult out;
  std::size_t lo = 0, hi = s + 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const Verdict v = phi(mid);
    ++out.evaluations;
    if (v == Verdict::One) {
      hi = mid;
    } else {
      if (v == Verdict::Unsure) out.converged = false;
      lo = mid;
    }
  }
  out.q_bar = lo;
  return out;
}

const char* to_string(BudgetMode mode) {
  return mode == BudgetMode::Shared ? "shared" : "per-evaluation";
}

BudgetMode parse_budget_mode(const std::string& text) {
  if (text == "per-evaluation" || text == "per-z") return BudgetMode::PerEvaluation;
  if (text == "shared") return BudgetMode::Shared;
  throw std::invalid_argument("unknown budget mode '" + text + "'");
}

DiscoveryBound discoveries(const CenteredMatrix& centered, const IndexSet& query, const TestConfig& cfg,
                           const BranchBudget& budget, BudgetMode mode) {
  if (query.empty()) throw std::domain_error("query set must be nonempty");
  if (query.back() >= centered.hyp_count()) throw std::out_of_range("query index out of range");

  DiscoveryBound out;
  out.set = query;
  out.s = query.size();
  out.m_effective = centered.hyp_count();

  std::size_t remaining = budget.h_max;
  std::size_t lo = 0, hi = out.s + 1;
  const auto phi = [&](std::size_t z) {
    BranchBudget step = budget;
    if (mode == BudgetMode::Shared && !budget.is_unlimited()) {
      // Steps still to come, counting this one: ceil(log2(hi - lo)).
      const std::size_t steps = std::bit_width(hi - lo - 1);
      step.h_max = remaining / std::max<std::size_t>(steps, 1);
    }
    const IterativeResult r = evaluate_phi_iterative(centered, query, z, step, cfg);
    out.iterations += r.iterations;
    remaining -= std::min(remaining, r.iterations);
    out.steps.emplace_back(z, r.value);
    if (r.value == Verdict::One) {
      hi = z;
    } else {
      lo = z;
    }
    return r.value;
  };
  const BisectionResult bis = binary_search_q(phi, out.s);
  out.q_bar = bis.q_bar;
  out.d = out.s - out.q_bar;
  out.tdp = static_cast<double>(out.d) / static_cast<double>(out.s);
  out.converged = bis.converged;
  out.phi_evaluations = bis.evaluations;
  return out;
}

DiscoveryBound lift(DiscoveryBound bound, const ReducedProblem& red) {
  bound.set = red.original_query;
  bound.s = red.original_query.size();
  bound.m_effective = red.m_prime();
  return bound;
}

DiscoveryEngine::DiscoveryEngine(StatisticMatrix stats, double alpha, EngineOptions options)
    : stats_(std::move(stats)), cfg_(alpha, stats_.b_count()), options_(options), centered_(center(stats_)) {}

DiscoveryBound DiscoveryEngine::discover(const IndexSet& query) const {
  if (!options_.reduce) return discoveries(centered_, query, cfg_, options_.budget, options_.mode);
  const ReducedProblem red = reduce(stats_, query, options_.t_ring);
  const CenteredMatrix c = center(red.matrix);
  return lift(discoveries(c, red.query, cfg_, options_.budget, options_.mode), red);
}

std::vector<QueryOutcome> simultaneous_report(const DiscoveryEngine& engine, const std::vector<IndexSet>& queries) {
  std::vector<QueryOutcome> out(queries.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < queries.size(); k = next++) {
      try {
        out[k].bound = engine.discover(queries[k]);
      } catch (const std::exception& e) {
        out[k].error = e.what();
      }
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(engine.options().threads, 1, std::max<std::size_t>(queries.size(), 1));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  return out;
}

LargestSubset largest_subset(const NestedQuery& nested, const std::function<DiscoveryBound(const IndexSet&)>& d_of) {
  const double gamma = nested.gamma;
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  const std::size_t m = nested.ordering.size();
  std::vector<Index> check = nested.ordering;
  std::sort(check.begin(), check.end());
  for (std::size_t k = 0; k < m; ++k) {
    if (check[k] != k) throw std::invalid_argument("ordering must be a permutation of all hypotheses");
  }

  LargestSubset out;
  if (gamma == 0.0) {
    out.size = m;
    return out;
  }
  std::size_t s = m;
  while (s > 0) {
    IndexSet set(nested.ordering.begin(), nested.ordering.begin() + static_cast<std::ptrdiff_t>(s));
    std::sort(set.begin(), set.end());
    const DiscoveryBound b = d_of(set);
    ++out.searches;
    if (static_cast<double>(b.d) >= gamma * static_cast<double>(s)) {
      out.size = s;
      out.d = b.d;
      out.tdp = b.tdp;
      return out;
    }
    s = std::min(s - 1, static_cast<std::size_t>(std::floor(static_cast<double>(b.d) / gamma)));
  }
  return out;
}

LargestSubset largest_subset(const NestedQuery& nested, const DiscoveryEngine& engine) {
  return largest_subset(nested, [&](const IndexSet& set) { return engine.discover(set); });
}

}  // namespace sumtdp

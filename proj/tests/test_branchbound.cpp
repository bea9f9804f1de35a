#include <algorithm>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "sumtdp/branchbound.hpp"
#include "sumtdp/oracle.hpp"

using namespace sumtdp;

namespace {
const TestConfig kToyCfg(0.4, 6);
}

TEST_CASE("pivot of the toy root is H1") {
  const CenteredMatrix c = center(fixtures::toy());
  CHECK(pick_pivot({}, c.observed(), {0, 1}, 1) == Index{0});
  Subspace sub;
  sub.forced = {0, 1, 2, 3};
  CHECK(pick_pivot(sub, c.observed(), {0, 1}, 1) == Index{4});
  sub.forced = {0, 1, 2, 3, 4};
  CHECK_FALSE(pick_pivot(sub, c.observed(), {0, 1}, 1).has_value());
}

TEST_CASE("pivot ties go to the highest index") {
  const StatisticMatrix t(2, 4, {3, 3, 1, 3, 0, 0, 0, 0});
  CHECK(pick_pivot({}, t.observed(), {2}, 1) == Index{3});
}

TEST_CASE("branching partitions the subspace") {
  const CenteredMatrix c = center(fixtures::toy());
  Subspace root;
  root.v_lo = 1;
  root.v_hi = 3;
  const auto [minus, plus] = branch(root, 0, {0, 1}, 1, 5);
  CHECK(minus.excluded == IndexSet{0});
  CHECK(plus.forced == IndexSet{0});
  CHECK(minus.v_lo == 1);
  CHECK(plus.v_hi == 3);
  CHECK_THROWS_AS(branch(minus, 0, {0, 1}, 1, 5), std::logic_error);

  // two levels give four disjoint pieces that cover every set of V_1
  const auto [mm, mp] = branch(minus, 2, {0, 1}, 1, 5);
  const auto [pm, pp] = branch(plus, 2, {0, 1}, 1, 5);
  const auto member = [](const Subspace& s, const IndexSet& v) {
    for (Index i : s.forced) {
      if (!std::binary_search(v.begin(), v.end(), i)) return false;
    }
    for (Index i : s.excluded) {
      if (std::binary_search(v.begin(), v.end(), i)) return false;
    }
    return true;
  };
  for (const auto& v : fixtures::all_subsets(5)) {
    const int hits = member(mm, v) + member(mp, v) + member(pm, v) + member(pp, v);
    CHECK(hits == 1);
  }
  CHECK_THROWS_AS(branch(mm, 0, {0, 1}, 1, 5), std::logic_error);
  // excluding the whole query leaves no set with overlap 1
  Subspace half;
  half.excluded = {0};
  CHECK_THROWS_AS(branch(half, 1, {0, 1}, 1, 5), std::logic_error);
}

TEST_CASE("iterative shortcut on the toy example") {
  const CenteredMatrix c = center(fixtures::toy());
  std::vector<Subspace> visited;
  const auto r = evaluate_phi_iterative(c, {0, 1}, 1, BranchBudget::unlimited(), kToyCfg,
                                        [&](const Subspace& s, const PhiVerdict&) { visited.push_back(s); });
  CHECK(r.value == Verdict::Zero);
  CHECK_FALSE(reject(c, r.witness, kToyCfg));
  CHECK(visited.front().excluded.empty());
  CHECK(visited[1].excluded == IndexSet{0});

  CHECK(evaluate_phi_iterative(c, {0, 1}, 1, {0}, kToyCfg).value == Verdict::Unsure);
  CHECK(evaluate_phi_iterative(c, {0, 1}, 2, {0}, kToyCfg).value == Verdict::One);
  CHECK(evaluate_phi_iterative(c, {0, 1}, 0, {0}, kToyCfg).value == Verdict::Zero);
  CHECK(evaluate_phi_iterative(c, {0, 1}, 3, {0}, kToyCfg).value == Verdict::One);
}

TEST_CASE("windows shrink along every branch") {
  Rng rng(5);
  for (int inst = 0; inst < 40; ++inst) {
    const auto ins = fixtures::random_instance(rng.next(), 4, 9, 5, 24);
    const CenteredMatrix c = center(ins.stats);
    const TestConfig cfg(ins.alpha, ins.stats.b_count());
    if (!cfg.has_power()) continue;
    const IndexSet s = fixtures::random_subset(rng, ins.stats.hyp_count());
    for (std::size_t z = 1; z <= s.size(); ++z) {
      evaluate_phi_iterative(c, s, z, BranchBudget::unlimited(), cfg, [](const Subspace& sub, const PhiVerdict& v) {
        if (v.value == Verdict::Unsure) {
          CHECK(v.v_lo >= sub.v_lo);
          CHECK(v.v_hi <= sub.v_hi);
          CHECK(v.v_lo <= v.v_hi);
        }
      });
    }
  }
}

TEST_CASE("anytime validity, budget monotonicity and convergence") {
  Rng rng(99);
  for (int inst = 0; inst < 80; ++inst) {
    const auto ins = fixtures::random_instance(rng.next(), 3, 9, 4, 32);
    const CenteredMatrix c = center(ins.stats);
    const TestConfig cfg(ins.alpha, ins.stats.b_count());
    const ExhaustiveOracle oracle(c, cfg);
    const std::size_t m = ins.stats.hyp_count();
    for (int q = 0; q < 5; ++q) {
      const IndexSet s = fixtures::random_subset(rng, m);
      for (std::size_t z = 0; z <= s.size() + 1; ++z) {
        const int truth = oracle.phi(s, z);
        Verdict prev = Verdict::Unsure;
        for (std::size_t h : {0, 1, 2, 4, 8, 16}) {
          const Verdict v = evaluate_phi_iterative(c, s, z, {h}, cfg).value;
          if (v == Verdict::One) CHECK(truth == 1);
          if (v == Verdict::Zero) CHECK(truth == 0);
          if (prev != Verdict::Unsure) CHECK(v == prev);
          prev = v;
        }
        const auto full = evaluate_phi_iterative(c, s, z, BranchBudget::unlimited(), cfg);
        REQUIRE(full.value != Verdict::Unsure);
        CHECK((full.value == Verdict::One) == (truth == 1));
        CHECK(full.evaluations <= (std::size_t{2} << m));
      }
    }
  }
}

TEST_CASE("exclusion children keep the parent's path") {
  Rng rng(31);
  for (int inst = 0; inst < 60; ++inst) {
    const auto ins = fixtures::random_instance(rng.next(), 3, 9, 4, 24);
    const CenteredMatrix c = center(ins.stats);
    const TestConfig cfg(ins.alpha, ins.stats.b_count());
    if (!cfg.has_power()) continue;
    const std::size_t m = ins.stats.hyp_count();
    const IndexSet s = fixtures::random_subset(rng, m);
    for (std::size_t z = 1; z <= s.size(); ++z) {
      Subspace sub;
      while (true) {
        const auto pivot = pick_pivot(sub, c.observed(), s, z);
        if (!pivot) break;
        Subspace minus = sub;
        minus.excluded.insert(std::upper_bound(minus.excluded.begin(), minus.excluded.end(), *pivot), *pivot);
        BoundPathWorkspace parent(c, s, z, sub, cfg);
        BoundPathWorkspace child(c, s, z, minus, cfg);
        if (child.empty()) break;
        CHECK(child.min_size() == parent.min_size());
        CHECK(child.max_size() + 1 == parent.max_size());
        for (std::size_t v = child.min_size(); v <= child.max_size(); ++v) {
          CHECK(child.path(v) == parent.path(v));
          CHECK(child.path_set(v) == parent.path_set(v));
          CHECK(child.bound(v) >= parent.bound(v));
        }
        sub = minus;
      }
    }
  }
}

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "sumtdp/oracle.hpp"
#include "sumtdp/shortcut.hpp"

using namespace sumtdp;

namespace {

const TestConfig kToyCfg(0.4, 6);

std::size_t overlap(const IndexSet& a, const IndexSet& b) {
  std::size_t k = 0;
  for (Index i : a) k += std::binary_search(b.begin(), b.end(), i);
  return k;
}

}  // namespace

TEST_CASE("bound and path tables of the toy example") {
  const CenteredMatrix c = center(fixtures::toy());
  const auto rows = bound_path_table(c, {0, 1}, 1, kToyCfg);
  REQUIRE(rows.size() == 5);
  const double bound[] = {-1, -2, -2, 1, 6};
  const double path[] = {2, 1, 1, 4, 6};
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(rows[k].size == k + 1);
    CHECK(rows[k].bound == bound[k]);
    CHECK(rows[k].path == path[k]);
  }
  BoundPathWorkspace ws(c, {0, 1}, 1, {}, kToyCfg);
  CHECK(ws.shape_indices() == std::pair<std::size_t, std::size_t>{2, 2});
  CHECK(ws.path_set(1) == IndexSet{1});
  CHECK(ws.path_set(2) == IndexSet{1, 3});
  CHECK(ws.path_set(3) == IndexSet{1, 3, 4});
  CHECK(ws.path_set(4) == IndexSet{1, 2, 3, 4});
  CHECK(ws.order().remainder.back() == 0);
  CHECK_THROWS_AS(ws.bound(0), std::out_of_range);
  CHECK_THROWS_AS(ws.bound(6), std::out_of_range);

  for (double b : [&] {
         std::vector<double> v;
         for (const auto& r : bound_path_table(c, {0, 1}, 2, kToyCfg)) v.push_back(r.bound);
         return v;
       }()) {
    CHECK(b > 0.0);
  }
}

TEST_CASE("single-step verdicts on the toy example") {
  const CenteredMatrix c = center(fixtures::toy());
  CHECK(evaluate_phi(c, {0, 1}, 0, {}, true, kToyCfg).value == Verdict::Zero);
  CHECK(evaluate_phi(c, {0, 1}, 2, {}, true, kToyCfg).value == Verdict::One);
  CHECK(evaluate_phi(c, {0, 1}, 3, {}, true, kToyCfg).value == Verdict::One);
  const PhiVerdict one = evaluate_phi(c, {0, 1}, 1, {}, true, kToyCfg);
  CHECK(one.value == Verdict::Unsure);
  CHECK(one.v_lo == 1);
  CHECK(one.v_hi == 3);
  CHECK(one.path_evaluations == 3);
  // v = 5 is settled by the shape index without evaluating the bound
  CHECK(one.bound_evaluations == 4);
  CHECK_THROWS(evaluate_phi(c, {0, 1}, 4, {}, true, kToyCfg));
}

TEST_CASE("forcing the pivot finds the non-rejected singleton") {
  const CenteredMatrix c = center(fixtures::toy());
  Subspace plus;
  plus.forced = {0};
  plus.v_lo = 1;
  plus.v_hi = 3;
  const PhiVerdict v = evaluate_phi(c, {0, 1}, 1, plus, true, kToyCfg);
  CHECK(v.value == Verdict::Zero);
  REQUIRE_FALSE(v.witness.empty());
  CHECK(v.witness.front() == 0);
  CHECK(v.witness.size() <= 3);
  CHECK(subset_quantile(c, v.witness, kToyCfg) <= 0.0);
}

TEST_CASE("degenerate subspaces") {
  const CenteredMatrix c = center(fixtures::toy());
  Subspace everything;
  everything.forced = {0, 1, 2, 3, 4};
  const PhiVerdict full = evaluate_phi(c, {0, 1, 2, 3, 4}, 5, everything, true, kToyCfg);
  CHECK(full.value == (reject(c, {0, 1, 2, 3, 4}, kToyCfg) ? Verdict::One : Verdict::Zero));

  BoundPathWorkspace single(c, {0, 1, 2, 3, 4}, 5, {}, kToyCfg);
  CHECK(single.single_set());
  CHECK(single.bound(5) == subset_quantile(c, {0, 1, 2, 3, 4}, kToyCfg));
  CHECK(single.path(5) == single.bound(5));

  Subspace none;
  none.excluded = {0, 1};
  BoundPathWorkspace empty(c, {0, 1}, 1, none, kToyCfg);
  CHECK(empty.empty());
  CHECK(evaluate_phi(c, {0, 1}, 1, none, true, kToyCfg).value == Verdict::One);

  Subspace bad;
  bad.forced = {2};
  bad.excluded = {2};
  CHECK_THROWS(evaluate_phi(c, {0, 1}, 1, bad, true, kToyCfg));
}

TEST_CASE("shape index fallbacks") {
  // remaining centered values all >= 0 somewhere: c1 collapses to the base size
  const StatisticMatrix pos(3, 3, {5, 5, 5, 1, 1, 1, 2, 2, 2});
  BoundPathWorkspace a(center(pos), {0}, 1, {}, TestConfig(0.4, 3));
  CHECK(a.shape_indices().first == 1);
  // remaining centered values all <= 0 with some < 0: both reach m
  const StatisticMatrix neg(3, 3, {0, 0, 0, 1, 1, 1, 0, 2, 2});
  BoundPathWorkspace b(center(neg), {0}, 1, {}, TestConfig(0.4, 3));
  CHECK(b.shape_indices() == std::pair<std::size_t, std::size_t>{3, 3});
}

TEST_CASE("no power means nothing is ever rejected") {
  const CenteredMatrix c = center(fixtures::toy());
  const TestConfig none(0.1, 6);
  CHECK(evaluate_phi(c, {0, 1}, 1, {}, true, none).value == Verdict::Zero);
  CHECK(evaluate_phi(c, {0, 1}, 3, {}, true, none).value == Verdict::One);
}

TEST_CASE("bound and path laws on random instances") {
  Rng rng(11);
  for (int inst = 0; inst < 60; ++inst) {
    const auto ins = fixtures::random_instance(rng.next(), 3, 8, 4, 20);
    const CenteredMatrix c = center(ins.stats);
    const TestConfig cfg(ins.alpha, ins.stats.b_count());
    if (!cfg.has_power()) continue;
    const std::size_t m = ins.stats.hyp_count();
    const auto subsets = fixtures::all_subsets(m);
    const ExhaustiveOracle oracle(c, cfg);
    for (int q = 0; q < 4; ++q) {
      const IndexSet s = fixtures::random_subset(rng, m);
      for (std::size_t z = 1; z <= s.size(); ++z) {
        BoundPathWorkspace ws(c, s, z, {}, cfg);
        std::vector<double> min_q(m + 1, std::numeric_limits<double>::infinity());
        for (const auto& v : subsets) {
          if (overlap(v, s) >= z) min_q[v.size()] = std::min(min_q[v.size()], subset_quantile(c, v, cfg));
        }
        const auto [c1, c2] = ws.shape_indices();
        for (std::size_t v = z; v <= m; ++v) {
          CHECK(ws.bound(v) <= min_q[v]);
          const IndexSet pv = ws.path_set(v);
          CHECK(pv.size() == v);
          CHECK(overlap(pv, s) >= z);
          CHECK(ws.path(v) == subset_quantile(c, pv, cfg));
          CHECK(ws.path(v) >= ws.bound(v));
          if (v < c1) CHECK(ws.bound(v) >= ws.bound(v + 1));
          if (v >= c2 && v < m) CHECK(ws.bound(v) <= ws.bound(v + 1));
        }
        const PhiVerdict verdict = evaluate_phi(c, s, z, {}, true, cfg);
        const int truth = oracle.phi(s, z);
        if (verdict.value == Verdict::One) CHECK(truth == 1);
        if (verdict.value == Verdict::Zero) {
          CHECK(truth == 0);
          CHECK_FALSE(reject(c, verdict.witness, cfg));
        }
      }
    }
  }
}

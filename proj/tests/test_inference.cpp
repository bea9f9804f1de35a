#include <bit>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sumtdp/inference.hpp"
#include "sumtdp/oracle.hpp"

using namespace sumtdp;

namespace {
const TestConfig kToyCfg(0.4, 6);

std::size_t ceil_log2(std::size_t x) { return std::bit_width(x - 1); }
}  // namespace

TEST_CASE("toy discoveries") {
  const CenteredMatrix c = center(fixtures::toy());
  const DiscoveryBound b = discoveries(c, {0, 1}, kToyCfg, BranchBudget::unlimited());
  CHECK(b.q_bar == 1);
  CHECK(b.d == 1);
  CHECK(b.tdp == 0.5);
  CHECK(b.converged);
  CHECK(b.phi_evaluations <= ceil_log2(b.s + 2));

  // the root evaluation is free, so budget 0 is the single-step bound
  const DiscoveryBound quick = discoveries(c, {0, 1}, kToyCfg, {0});
  CHECK(quick.d == 1);
  CHECK(quick.iterations == 0);
}

TEST_CASE("bisection on synthetic step functions") {
  for (std::size_t s = 1; s <= 40; ++s) {
    for (std::size_t q = 0; q <= s; ++q) {
      std::size_t calls = 0;
      const auto r = binary_search_q(
          [&](std::size_t z) {
            ++calls;
            CHECK(z >= 1);
            CHECK(z <= s);
            return z > q ? Verdict::One : Verdict::Zero;
          },
          s);
      CHECK(r.q_bar == q);
      CHECK(r.converged);
      CHECK(calls == r.evaluations);
      CHECK(r.evaluations <= ceil_log2(s + 2));
    }
  }
  CHECK(binary_search_q([](std::size_t) { return Verdict::One; }, 7).q_bar == 0);
  CHECK(binary_search_q([](std::size_t) { return Verdict::One; }, 1).evaluations == 1);
  const auto unsure = binary_search_q([](std::size_t) { return Verdict::Unsure; }, 5);
  CHECK(unsure.q_bar == 5);
  CHECK_FALSE(unsure.converged);
}

TEST_CASE("d matches exhaustive closed testing, all subsets of small instances") {
  Rng rng(123);
  for (int inst = 0; inst < 25; ++inst) {
    const auto ins = fixtures::random_instance(rng.next(), 3, 7, 4, 24);
    const CenteredMatrix c = center(ins.stats);
    const TestConfig cfg(ins.alpha, ins.stats.b_count());
    const ExhaustiveOracle oracle(c, cfg);
    for (const auto& s : fixtures::all_subsets(ins.stats.hyp_count())) {
      const DiscoveryBound exact = discoveries(c, s, cfg, BranchBudget::unlimited());
      REQUIRE(exact.d == s.size() - oracle.q(s));
      CHECK(exact.converged);
      CHECK(exact.phi_evaluations <= ceil_log2(s.size() + 2));
      std::size_t prev = 0;
      for (std::size_t h : {0, 1, 2, 4, 8}) {
        const DiscoveryBound b = discoveries(c, s, cfg, {h});
        CHECK(b.d <= exact.d);
        CHECK(b.d >= prev);
        if (b.converged) CHECK(b.d == exact.d);
        prev = b.d;
        const DiscoveryBound shared = discoveries(c, s, cfg, {h}, BudgetMode::Shared);
        CHECK(shared.d <= exact.d);
        CHECK(shared.iterations <= h);
      }
    }
    // closed testing rejects the global null iff d(M) > 0
    IndexSet all(ins.stats.hyp_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    CHECK((discoveries(c, all, cfg, BranchBudget::unlimited()).d > 0) == reject(c, all, cfg));
  }
}

TEST_CASE("engine, simultaneous report and reduction") {
  const DiscoveryEngine plain(fixtures::toy(), 0.4, {BranchBudget::unlimited()});
  const auto all = fixtures::all_subsets(5);
  EngineOptions opt{BranchBudget::unlimited()};
  opt.threads = 3;
  const DiscoveryEngine threaded(fixtures::toy(), 0.4, opt);
  auto queries = all;
  queries.push_back({0, 1});
  queries.push_back({});
  const auto report = simultaneous_report(threaded, queries);
  const ExhaustiveOracle oracle(center(fixtures::toy()), TestConfig(0.4, 6));
  for (std::size_t k = 0; k < all.size(); ++k) {
    REQUIRE(report[k].bound);
    CHECK(report[k].bound->d == all[k].size() - oracle.q(all[k]));
    CHECK(report[k].bound->d == plain.discover(all[k]).d);
  }
  CHECK(report[all.size()].bound->d == 1);
  CHECK_FALSE(report.back().bound);
  CHECK_FALSE(report.back().error.empty());

  EngineOptions red{BranchBudget::unlimited()};
  red.reduce = true;
  const DiscoveryEngine truncated(fixtures::toy_truncated(), 0.4, red);
  const DiscoveryBound b = truncated.discover({0, 1});
  CHECK(b.m_effective == 3);
  CHECK(b.set == IndexSet{0, 1});
  CHECK(b.d == DiscoveryEngine(fixtures::toy_truncated(), 0.4, {BranchBudget::unlimited()}).discover({0, 1}).d);
}

TEST_CASE("largest subset with a TDP guarantee") {
  const DiscoveryEngine engine(fixtures::toy(), 0.4, {BranchBudget::unlimited()});
  CHECK(largest_subset({{0, 1, 2, 3, 4}, 0.0}, engine).size == 5);

  Rng rng(8);
  for (int inst = 0; inst < 30; ++inst) {
    const auto ins = fixtures::random_instance(rng.next(), 3, 8, 5, 24);
    const DiscoveryEngine e(ins.stats, ins.alpha, {BranchBudget::unlimited()});
    const std::size_t m = ins.stats.hyp_count();
    std::vector<Index> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (double gamma : {0.1, 0.25, 0.5, 0.75, 1.0}) {
      std::size_t expected = 0;
      for (std::size_t s = 1; s <= m; ++s) {
        IndexSet set(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
        std::sort(set.begin(), set.end());
        if (static_cast<double>(e.discover(set).d) >= gamma * static_cast<double>(s)) expected = s;
      }
      CHECK(largest_subset({order, gamma}, e).size == expected);
    }
  }

  const DiscoveryEngine null_engine(StatisticMatrix(10, 3, std::vector<double>(30, 1.0)), 0.2,
                                    {BranchBudget::unlimited()});
  CHECK(largest_subset({{2, 0, 1}, 1.0}, null_engine).size == 0);
  CHECK_THROWS(largest_subset({{0, 0, 1}, 0.5}, null_engine));
  CHECK_THROWS(largest_subset({{0, 1, 2}, 1.5}, null_engine));
}

TEST_CASE("budget modes") {
  CHECK(parse_budget_mode("shared") == BudgetMode::Shared);
  CHECK(parse_budget_mode("per-z") == BudgetMode::PerEvaluation);
  CHECK_THROWS(parse_budget_mode("global"));
  CHECK(std::string(to_string(BudgetMode::Shared)) == "shared");
}

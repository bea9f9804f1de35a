#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "sumtdp/oracle.hpp"

using namespace sumtdp;

TEST_CASE("oracle on the toy example") {
  const CenteredMatrix c = center(fixtures::toy());
  const TestConfig cfg(0.4, 6);
  CHECK(oracle_q(c, {0, 1}, cfg) == 1);
  CHECK(oracle_phi(c, {0, 1}, 2, cfg) == 1);
  CHECK(oracle_phi(c, {0, 1}, 1, cfg) == 0);
  CHECK(oracle_phi(c, {0, 1}, 0, cfg) == 0);
  CHECK(oracle_phi(c, {0, 1}, 3, cfg) == 1);
  CHECK_THROWS(oracle_q(c, {}, cfg));
}

TEST_CASE("oracle agrees with direct rejection and its own change point") {
  Rng rng(4);
  for (int inst = 0; inst < 20; ++inst) {
    const auto ins = fixtures::random_instance(rng.next(), 2, 9, 2, 30);
    const CenteredMatrix c = center(ins.stats);
    const TestConfig cfg(ins.alpha, ins.stats.b_count());
    const ExhaustiveOracle oracle(c, cfg);
    const auto subsets = fixtures::all_subsets(ins.stats.hyp_count());
    CHECK_FALSE(oracle.rejected(0));
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      CHECK(oracle.rejected(static_cast<std::uint32_t>(k + 1)) == reject(c, subsets[k], cfg));
    }
    for (const auto& s : subsets) {
      const std::size_t q = oracle.q(s);
      for (std::size_t z = 0; z <= s.size() + 1; ++z) CHECK(oracle.phi(s, z) == (z > q ? 1 : 0));
    }
  }
}

TEST_CASE("every nonempty set rejected gives q = 0") {
  // one strongly positive observed row, all transformed rows far below
  const StatisticMatrix t(5, 3, {9, 9, 9, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 1, 1});
  const CenteredMatrix c = center(t);
  const TestConfig cfg(0.4, 5);
  CHECK(oracle_q(c, {0, 1, 2}, cfg) == 0);
}

TEST_CASE("oracle size caps") {
  const CenteredMatrix wide = center(StatisticMatrix(2, 13, std::vector<double>(26, 0.0)));
  CHECK_THROWS_AS(ExhaustiveOracle(wide, TestConfig(0.5, 2)), std::length_error);
  const CenteredMatrix tall = center(StatisticMatrix(65, 2, std::vector<double>(130, 0.0)));
  CHECK_THROWS_AS(ExhaustiveOracle(tall, TestConfig(0.5, 65)), std::length_error);
}

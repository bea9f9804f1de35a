#include "sumtdp/oracle.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace sumtdp {

ExhaustiveOracle::ExhaustiveOracle(const CenteredMatrix& centered, const TestConfig& cfg, OracleLimit limit)
    : m_(centered.hyp_count()) {
  const std::size_t b = centered.b_count();
  if (m_ > limit.max_m || b > limit.max_b) {
    throw std::length_error("oracle limited to m <= " + std::to_string(limit.max_m) +
                            " and B <= " + std::to_string(limit.max_b));
  }
  if (cfg.b_count() != b) throw std::invalid_argument("test configuration built for a different B");

  const std::uint32_t count = std::uint32_t{1} << m_;
  rejected_.assign(count, 0);
  if (!cfg.has_power()) return;

  std::vector<double> sums(b, 0.0), scratch(b);
  std::uint32_t gray = 0;
  for (std::uint32_t k = 1; k < count; ++k) {
    const int bit = std::countr_zero(k);
    gray ^= std::uint32_t{1} << bit;
    const double sign = (gray >> bit) & 1u ? 1.0 : -1.0;
    for (std::size_t r = 0; r < b; ++r) sums[r] += sign * centered(r, static_cast<std::size_t>(bit));
    scratch = sums;
    rejected_[gray] = kth_smallest(scratch, cfg.omega()) > 0.0;
  }
}

std::uint32_t ExhaustiveOracle::mask_of(const IndexSet& query) const {
  if (query.empty()) throw std::domain_error("query set must be nonempty");
  std::uint32_t mask = 0;
  for (Index i : query) {
    if (i >= m_) throw std::out_of_range("query index out of range");
    mask |= std::uint32_t{1} << i;
  }
  return mask;
}

std::size_t ExhaustiveOracle::q(const IndexSet& query) const {
  const std::uint32_t s = mask_of(query);
  std::size_t best = 0;
  for (std::uint32_t v = 0; v < rejected_.size(); ++v) {
    if (!rejected_[v]) best = std::max<std::size_t>(best, std::popcount(v & s));
  }
  return best;
}

int ExhaustiveOracle::phi(const IndexSet& query, std::size_t z) const {
  const std::uint32_t s = mask_of(query);
  for (std::uint32_t v = 0; v < rejected_.size(); ++v) {
    if (static_cast<std::size_t>(std::popcount(v & s)) >= z && !rejected_[v]) return 0;
  }
  return 1;
}

std::size_t oracle_q(const CenteredMatrix& centered, const IndexSet& query, const TestConfig& cfg) {
  return ExhaustiveOracle(centered, cfg).q(query);
}

int oracle_phi(const CenteredMatrix& centered, const IndexSet& query, std::size_t z, const TestConfig& cfg) {
  return ExhaustiveOracle(centered, cfg).phi(query, z);
}

}  // namespace sumtdp

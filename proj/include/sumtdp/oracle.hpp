#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sumtdp/statmatrix.hpp"

namespace sumtdp {

struct OracleLimit {
  std::size_t max_m = 12;
  std::size_t max_b = 64;
};

/// Brute-force closed testing: the rejection outcome of every one of the 2^m
/// intersection hypotheses, enumerated once in Gray-code order.
class ExhaustiveOracle {
public:
  ExhaustiveOracle(const CenteredMatrix& centered, const TestConfig& cfg, OracleLimit limit = {});

  std::size_t hyp_count() const { return m_; }
  bool rejected(std::uint32_t mask) const { return rejected_[mask] != 0; }

  /// max |V n S| over non-rejected V (the empty set included).
  std::size_t q(const IndexSet& query) const;
  /// 1 iff every V with |V n S| >= z is rejected.
  int phi(const IndexSet& query, std::size_t z) const;

private:
  std::uint32_t mask_of(const IndexSet& query) const;

  std::size_t m_;
  std::vector<char> rejected_;
};

std::size_t oracle_q(const CenteredMatrix& centered, const IndexSet& query, const TestConfig& cfg);
int oracle_phi(const CenteredMatrix& centered, const IndexSet& query, std::size_t z, const TestConfig& cfg);

}  // namespace sumtdp

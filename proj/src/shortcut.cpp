#include "sumtdp/shortcut.hpp"

#include <algorithm>
#include <stdexcept>

namespace sumtdp {
namespace {

enum : unsigned char { kFree = 0, kForced = 1, kExcluded = 2 };

std::vector<unsigned char> membership(const Subspace& sub, std::size_t m) {
  std::vector<unsigned char> mask(m, kFree);
  for (Index i : sub.forced) {
    if (i >= m) throw std::out_of_range("forced index out of range");
    mask[i] = kForced;
  }
  for (Index i : sub.excluded) {
    if (i >= m) throw std::out_of_range("excluded index out of range");
    if (mask[i] == kForced) throw std::invalid_argument("index both forced and excluded");
    mask[i] = kExcluded;
  }
  return mask;
}

void check_query(const IndexSet& query, std::size_t m) {
  if (query.empty()) throw std::domain_error("query set must be nonempty");
  if (query.back() >= m) throw std::out_of_range("query index out of range");
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Zero: return "0";
    case Verdict::One: return "1";
    case Verdict::Unsure: return "unsure";
  }
  return "?";
}

PathOrder path_order(std::span<const double> observed, const IndexSet& query, std::size_t z, const Subspace& sub) {
  const std::size_t m = observed.size();
  check_query(query, m);
  const auto mask = membership(sub, m);
  std::vector<char> in_query(m, 0);
  for (Index i : query) in_query[i] = 1;

  std::size_t forced_in_query = 0;
  std::vector<Index> free_query, free_other;
  for (Index i = 0; i < m; ++i) {
    if (mask[i] == kForced && in_query[i]) ++forced_in_query;
    if (mask[i] != kFree) continue;
    (in_query[i] ? free_query : free_other).push_back(i);
  }
  const auto by_observed = [&](Index a, Index b) {
    return observed[a] < observed[b] || (observed[a] == observed[b] && a < b);
  };
  std::sort(free_query.begin(), free_query.end(), by_observed);
  const std::size_t needed = z > forced_in_query ? std::min(z - forced_in_query, free_query.size()) : 0;

  PathOrder order;
  order.forced = sub.forced;
  order.reserved.assign(free_query.begin(), free_query.begin() + static_cast<std::ptrdiff_t>(needed));
  order.remainder.assign(free_query.begin() + static_cast<std::ptrdiff_t>(needed), free_query.end());
  order.remainder.insert(order.remainder.end(), free_other.begin(), free_other.end());
  std::sort(order.remainder.begin(), order.remainder.end(), by_observed);
  return order;
}

BoundPathWorkspace::BoundPathWorkspace(const CenteredMatrix& centered, const IndexSet& query, std::size_t z,
                                       const Subspace& sub, const TestConfig& cfg)
    : centered_(centered), omega_(cfg.omega()), b_(centered.b_count()) {
  const std::size_t m = centered.hyp_count();
  check_query(query, m);
  if (z < 1 || z > query.size()) throw std::domain_error("bound/path need 1 <= z <= |S|");
  if (cfg.b_count() != b_) throw std::invalid_argument("test configuration built for a different B");
  if (!cfg.has_power()) throw std::domain_error("B < 1/alpha: bound and path are undefined");

  const auto mask = membership(sub, m);
  std::vector<char> in_query(m, 0);
  for (Index i : query) in_query[i] = 1;

  std::size_t forced_in_query = 0;
  std::vector<Index> free_query, free_other;
  for (Index i = 0; i < m; ++i) {
    if (mask[i] == kForced && in_query[i]) ++forced_in_query;
    if (mask[i] != kFree) continue;
    (in_query[i] ? free_query : free_other).push_back(i);
  }
  needed_ = z > forced_in_query ? z - forced_in_query : 0;
  if (free_query.size() < needed_) {
    empty_ = true;
    return;
  }
  base_ = sub.forced.size() + needed_;
  width_ = free_query.size() + free_other.size() - needed_;
  order_ = path_order(centered.observed(), query, z, sub);

  const std::size_t stride = width_ + 1;
  bound_prefix_.resize(b_ * stride);
  std::vector<double> col_max(stride, -std::numeric_limits<double>::infinity());
  std::vector<double> col_min(stride, std::numeric_limits<double>::infinity());
  std::vector<double> from_query(free_query.size());
  std::vector<double> rest;
  rest.reserve(width_);

  for (std::size_t r = 0; r < b_; ++r) {
    const auto row = centered.row(r);
    double acc = 0.0;
    for (Index i : sub.forced) acc += row[i];
    for (std::size_t k = 0; k < free_query.size(); ++k) from_query[k] = row[free_query[k]];
    const auto cut = from_query.begin() + static_cast<std::ptrdiff_t>(needed_);
    std::nth_element(from_query.begin(), cut, from_query.end());
    for (auto it = from_query.begin(); it != cut; ++it) acc += *it;

    rest.assign(cut, from_query.end());
    for (Index i : free_other) rest.push_back(row[i]);
    std::sort(rest.begin(), rest.end());

    double* prefix = bound_prefix_.data() + r * stride;
    prefix[0] = acc;
    for (std::size_t h = 1; h <= width_; ++h) {
      const double x = rest[h - 1];
      prefix[h] = prefix[h - 1] + x;
      col_max[h] = std::max(col_max[h], x);
      col_min[h] = std::min(col_min[h], x);
    }
  }

  std::size_t h1 = 0, h2 = 0;
  for (std::size_t h = 1; h <= width_; ++h) {
    if (col_max[h] <= 0.0) h1 = h;
    if (col_min[h] < 0.0) h2 = h;
  }
  c1_ = base_ + h1;
  c2_ = base_ + h2;
  scratch_.resize(b_);
}

double BoundPathWorkspace::column_quantile(const std::vector<double>& prefix, std::size_t h) {
  const std::size_t stride = width_ + 1;
  for (std::size_t r = 0; r < b_; ++r) scratch_[r] = prefix[r * stride + h];
  return kth_smallest(scratch_, omega_);
}

double BoundPathWorkspace::bound(std::size_t v) {
  if (empty_ || v < min_size() || v > max_size()) throw std::out_of_range("size outside the subspace");
  return column_quantile(bound_prefix_, v - base_);
}

void BoundPathWorkspace::build_path() {
  const std::size_t stride = width_ + 1;
  path_prefix_.resize(b_ * stride);
  for (std::size_t r = 0; r < b_; ++r) {
    const auto row = centered_.row(r);
    double acc = 0.0;
    for (Index i : order_.forced) acc += row[i];
    for (Index i : order_.reserved) acc += row[i];
    double* prefix = path_prefix_.data() + r * stride;
    prefix[0] = acc;
    for (std::size_t h = 1; h <= width_; ++h) prefix[h] = prefix[h - 1] + row[order_.remainder[h - 1]];
  }
}

double BoundPathWorkspace::path(std::size_t v) {
  if (empty_ || v < min_size() || v > max_size()) throw std::out_of_range("size outside the subspace");
  if (path_prefix_.empty()) build_path();
  return column_quantile(path_prefix_, v - base_);
}

IndexSet BoundPathWorkspace::path_set(std::size_t v) const {
  if (empty_ || v < min_size() || v > max_size()) throw std::out_of_range("size outside the subspace");
  IndexSet set = order_.forced;
  set.insert(set.end(), order_.reserved.begin(), order_.reserved.end());
  set.insert(set.end(), order_.remainder.begin(), order_.remainder.begin() + static_cast<std::ptrdiff_t>(v - base_));
  std::sort(set.begin(), set.end());
  return set;
}

PhiVerdict evaluate_phi(const CenteredMatrix& centered, const IndexSet& query, std::size_t z, const Subspace& sub,
                        bool want_path, const TestConfig& cfg) {
  check_query(query, centered.hyp_count());
  const std::size_t s = query.size();
  PhiVerdict out;
  if (z == 0) {
    // The empty set belongs to V_0 and is never rejected.
    out.value = Verdict::Zero;
    return out;
  }
  if (z == s + 1) {
    out.value = Verdict::One;
    return out;
  }
  if (z > s + 1) throw std::domain_error("z must lie in 0..|S|+1");

  if (!cfg.has_power()) {
    out.value = Verdict::Zero;
    out.witness = query;
    return out;
  }

  BoundPathWorkspace ws(centered, query, z, sub, cfg);
  if (ws.empty()) {
    out.value = Verdict::One;
    return out;
  }
  const std::size_t lo = std::max(sub.v_lo, ws.min_size());
  const std::size_t hi = std::min(sub.v_hi, ws.max_size());
  if (lo > hi) {
    out.value = Verdict::One;
    return out;
  }

  if (ws.single_set()) {
    // Bound and path coincide with the quantile of the only member.
    ++out.bound_evaluations;
    if (ws.bound(ws.min_size()) <= 0.0) {
      out.value = Verdict::Zero;
      out.witness = ws.path_set(ws.min_size());
    } else {
      out.value = Verdict::One;
    }
    return out;
  }

  const auto [c1, c2] = ws.shape_indices();
  std::vector<std::size_t> unsure;

  const auto check_path = [&](std::size_t v) {
    if (!want_path) return false;
    ++out.path_evaluations;
    if (ws.path(v) <= 0.0) {
      out.value = Verdict::Zero;
      out.witness = ws.path_set(v);
      return true;
    }
    return false;
  };

  // Downward from c1 the bound can only grow, so the first positive value
  // settles every smaller size in the window.
  const std::size_t turn = std::clamp(c1, lo, hi);
  for (std::size_t v = turn + 1; v-- > lo;) {
    ++out.bound_evaluations;
    if (ws.bound(v) > 0.0) break;
    unsure.push_back(v);
    if (check_path(v)) return out;
  }
  // Upward past c2 the bound can only grow as well.
  for (std::size_t v = turn + 1; v <= hi; ++v) {
    ++out.bound_evaluations;
    if (ws.bound(v) > 0.0) {
      if (v >= c2) break;
      continue;
    }
    unsure.push_back(v);
    if (check_path(v)) return out;
  }

  if (unsure.empty()) {
    out.value = Verdict::One;
    return out;
  }
  const auto [mn, mx] = std::minmax_element(unsure.begin(), unsure.end());
  out.value = Verdict::Unsure;
  out.v_lo = *mn;
  out.v_hi = *mx;
  return out;
}

std::vector<BoundPathRow> bound_path_table(const CenteredMatrix& centered, const IndexSet& query, std::size_t z,
                                           const TestConfig& cfg) {
  BoundPathWorkspace ws(centered, query, z, Subspace{}, cfg);
  std::vector<BoundPathRow> rows;
  for (std::size_t v = ws.min_size(); v <= ws.max_size(); ++v) rows.push_back({v, ws.bound(v), ws.path(v)});
  return rows;
}

}  // namespace sumtdp

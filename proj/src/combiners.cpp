#include "sumtdp/combiners.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace sumtdp {
namespace {

constexpr double kOneMinusUlp = 1.0 - 0x1.0p-52;

double check_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("p-value outside (0, 1]: " + std::to_string(p));
  return p;
}

}  // namespace

double Combiner::operator()(double x) const {
  switch (kind) {
    case CombinerKind::Identity:
      return x;
    case CombinerKind::Custom:
      if (!custom) throw std::logic_error("custom combiner without a function");
      return custom(x);
    case CombinerKind::Fisher:
      return -std::log(check_p(x));
    case CombinerKind::Pearson:
      return std::log1p(-std::min(check_p(x), kOneMinusUlp));
    case CombinerKind::Liptak: {
      static const boost::math::normal_distribution<double> std_normal;
      return boost::math::quantile(boost::math::complement(std_normal, std::min(check_p(x), kOneMinusUlp)));
    }
    case CombinerKind::Edgington:
      return -check_p(x);
    case CombinerKind::Cauchy:
      return std::tan((0.5 - std::min(check_p(x), kOneMinusUlp)) * std::numbers::pi);
    case CombinerKind::GeneralizedMean:
      check_p(x);
      if (r == 0.0) return -std::log(x);
      return r < 0.0 ? std::pow(x, r) : -std::pow(x, r);
  }
  throw std::logic_error("unknown combiner");
}

std::string Combiner::name() const {
  switch (kind) {
    case CombinerKind::Identity: return "identity";
    case CombinerKind::Custom: return "custom";
    case CombinerKind::Fisher: return "fisher";
    case CombinerKind::Pearson: return "pearson";
    case CombinerKind::Liptak: return "liptak";
    case CombinerKind::Edgington: return "edgington";
    case CombinerKind::Cauchy: return "cauchy";
    case CombinerKind::GeneralizedMean: {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, r);
      return "vw:" + std::string(buf, res.ptr);
    }
  }
  return "unknown";
}

Combiner parse_combiner(const std::string& text) {
  if (text == "identity") return Combiner::identity();
  if (text == "fisher") return Combiner::of(CombinerKind::Fisher);
  if (text == "pearson") return Combiner::of(CombinerKind::Pearson);
  if (text == "liptak" || text == "stouffer") return Combiner::of(CombinerKind::Liptak);
  if (text == "edgington") return Combiner::of(CombinerKind::Edgington);
  if (text == "cauchy") return Combiner::of(CombinerKind::Cauchy);
  if (text.rfind("vw:", 0) == 0) {
    const std::string num = text.substr(3);
    double r = 0.0;
    const auto res = std::from_chars(num.data(), num.data() + num.size(), r);
    if (num.empty() || res.ec != std::errc() || res.ptr != num.data() + num.size() || !std::isfinite(r)) {
      throw std::invalid_argument("bad generalized-mean exponent in '" + text + "'");
    }
    return Combiner::generalized_mean(r);
  }
  throw std::invalid_argument("unknown combiner '" + text + "'");
}

StatisticMatrix apply_combiner(const StatisticMatrix& stats, const Combiner& c) {
  std::vector<double> out(stats.values().size());
  std::transform(stats.values().begin(), stats.values().end(), out.begin(), [&](double x) { return c(x); });
  return StatisticMatrix(stats.b_count(), stats.hyp_count(), std::move(out), stats.names());
}

StatisticMatrix truncate(const StatisticMatrix& stats, const TruncationRule& rule) {
  if (std::isfinite(rule.t_star) && rule.t_ring > rule.t_star) {
    throw std::invalid_argument("truncation ground value exceeds the threshold");
  }
  std::vector<double> out = stats.values();
  for (double& x : out) {
    if (x < rule.t_star) x = rule.t_ring;
  }
  return StatisticMatrix(stats.b_count(), stats.hyp_count(), std::move(out), stats.names());
}

double threshold_from_rank(const StatisticMatrix& stats, std::size_t k) {
  const auto& v = stats.values();
  if (k < 1 || k > v.size()) throw std::out_of_range("rank k must lie in 1..B*m");
  std::vector<double> copy = v;
  auto nth = copy.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(copy.begin(), nth, copy.end(), std::greater<>());
  return *nth;
}

}  // namespace sumtdp

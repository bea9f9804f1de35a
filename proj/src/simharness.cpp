#include "sumtdp/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>
#include "json.hpp"

#include "sumtdp/csv.hpp"

namespace sumtdp {
namespace {

using nlohmann::json;

std::size_t active_count(const SimulationCell& cell) {
  return static_cast<std::size_t>(std::ceil(cell.a * static_cast<double>(cell.m) - 1e-9));
}

template <class T>
std::vector<T> one_or_many(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

std::optional<double> optional_number(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

std::vector<SimulationCell> SimulationConfig::cells() const {
  std::vector<SimulationCell> out;
  for (double a_ : a) {
    for (double beta_ : beta) {
      for (double rho_ : rho) {
        for (const auto& p : p_star) {
          SimulationCell c = base;
          c.a = a_;
          c.beta = beta_;
          c.rho = rho_;
          c.p_star = p;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

void SimulationConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw std::invalid_argument("simulation config: " + msg); };
  if (base.n < 2) fail("n must be at least 2");
  if (base.m < 1) fail("m must be at least 1");
  if (!(base.alpha > 0.0 && base.alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (base.b_count < 1) fail("B must be at least 1");
  if (base.reps < 1) fail("reps must be at least 1");
  if (base.combiners.empty()) fail("no combiners listed");
  for (const auto& c : base.combiners) {
    if (!parse_combiner(c).takes_pvalues()) fail("combiner '" + c + "' does not take p-values");
  }
  if (!(base.p_ground > 0.0 && base.p_ground <= 1.0)) fail("p_ground must lie in (0, 1]");
  if (a.empty() || beta.empty() || rho.empty() || p_star.empty()) fail("grid axes must be nonempty");
  for (double x : a) {
    if (!(x >= 0.0 && x <= 1.0)) fail("a must lie in [0, 1]");
  }
  for (double x : beta) {
    if (!(x > base.alpha && x < 1.0)) fail("beta must lie in (alpha, 1)");
  }
  for (double x : rho) {
    if (!(x >= 0.0 && x < 1.0)) fail("rho must lie in [0, 1)");
  }
  for (const auto& p : p_star) {
    if (p && !(*p > 0.0 && *p <= base.p_ground)) fail("p_star must lie in (0, p_ground]");
  }
}

SimulationConfig load_simulation_config(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("simulation config: ") + e.what());
  }
  if (!j.is_object()) throw InputError("simulation config: expected a JSON object");
  SimulationConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") cfg.base.n = value.get<std::size_t>();
      else if (key == "m") cfg.base.m = value.get<std::size_t>();
      else if (key == "a") cfg.a = one_or_many<double>(value);
      else if (key == "beta") cfg.beta = one_or_many<double>(value);
      else if (key == "rho") cfg.rho = one_or_many<double>(value);
      else if (key == "alpha") cfg.base.alpha = value.get<double>();
      else if (key == "B") cfg.base.b_count = value.get<std::size_t>();
      else if (key == "p_star") {
        cfg.p_star.clear();
        if (value.is_array()) {
          for (const auto& x : value) cfg.p_star.push_back(optional_number(x));
        } else {
          cfg.p_star.push_back(optional_number(value));
        }
      }
      else if (key == "p_ground") cfg.base.p_ground = value.get<double>();
      else if (key == "reps") cfg.base.reps = value.get<std::size_t>();
      else if (key == "combiners") cfg.base.combiners = one_or_many<std::string>(value);
      else if (key == "seed") cfg.base.seed = value.get<std::uint64_t>();
      else if (key == "max_iter") {
        cfg.base.budget = value.is_null() ? BranchBudget::unlimited() : BranchBudget{value.get<std::size_t>()};
      }
      else if (key == "threads") cfg.threads = value.get<std::size_t>();
      else throw InputError("simulation config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("simulation config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SimulationConfig load_simulation_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return load_simulation_config(in);
}

std::string simulation_config_json(const SimulationConfig& cfg) {
  json p = json::array();
  for (const auto& x : cfg.p_star) p.push_back(optional_json(x));
  const auto& b = cfg.base;
  json j = {{"n", b.n},
            {"m", b.m},
            {"a", cfg.a},
            {"beta", cfg.beta},
            {"rho", cfg.rho},
            {"alpha", b.alpha},
            {"B", b.b_count},
            {"p_star", p},
            {"p_ground", b.p_ground},
            {"reps", b.reps},
            {"combiners", b.combiners},
            {"seed", b.seed},
            {"max_iter", b.budget.is_unlimited() ? json(nullptr) : json(b.budget.h_max)},
            {"threads", cfg.threads}};
  return j.dump(2);
}

double t_test_power(std::size_t n, double alpha, double mu) {
  const double df = static_cast<double>(n - 1);
  const double crit = boost::math::quantile(boost::math::complement(boost::math::students_t(df), alpha / 2));
  if (mu == 0.0) return alpha;
  const boost::math::non_central_t shifted(df, mu * std::sqrt(static_cast<double>(n)));
  return boost::math::cdf(boost::math::complement(shifted, crit)) + boost::math::cdf(shifted, -crit);
}

double calibrate_signal(std::size_t n, double alpha, double beta) {
  if (n < 2) throw std::invalid_argument("power calibration needs n >= 2");
  if (!(beta > alpha && beta < 1.0)) throw std::invalid_argument("beta must lie in (alpha, 1)");
  double lo = 0.0, hi = 1.0;
  while (t_test_power(n, alpha, hi) < beta) hi *= 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (t_test_power(n, alpha, mid) < beta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Replicate generate(const SimulationCell& cell, std::size_t rep, std::optional<double> signal) {
  const double mu = signal ? *signal : calibrate_signal(cell.n, cell.alpha, cell.beta);
  Rng rng(derive_seed(cell.seed, 2 * rep));
  const std::size_t active = active_count(cell);
  const double shared = std::sqrt(cell.rho), own = std::sqrt(1.0 - cell.rho);
  std::vector<double> values(cell.n * cell.m);
  for (std::size_t r = 0; r < cell.n; ++r) {
    const double z0 = rng.normal();
    for (std::size_t c = 0; c < cell.m; ++c) {
      values[r * cell.m + c] = shared * z0 + own * rng.normal() + (c < active ? mu : 0.0);
    }
  }
  return {RawData(cell.n, cell.m, std::move(values)), active};
}

std::vector<double> sign_flip_pvalues(const RawData& data, std::size_t b_count, std::uint64_t seed) {
  const std::size_t n = data.n(), m = data.m();
  if (n < 2) throw std::domain_error("t test needs n >= 2");
  // Sums of squares do not change under sign flips; only the column sums do.
  std::vector<double> squares(m, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) squares[c] += data(r, c) * data(r, c);
  }
  const auto drawn = draw_transformations(n, {SchemeKind::SignFlip, b_count, seed});
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double nd = static_cast<double>(n);
  std::vector<double> p(b_count * m), sums(m);
  for (std::size_t b = 0; b < b_count; ++b) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const double s = drawn.signs[b][r];
      const auto row = data.row(r);
      for (std::size_t c = 0; c < m; ++c) sums[c] += s * row[c];
    }
    for (std::size_t c = 0; c < m; ++c) {
      const double mean = sums[c] / nd;
      const double var = (squares[c] - nd * mean * mean) / (nd - 1.0);
      if (!(var > 0.0)) throw std::domain_error("column " + std::to_string(c + 1) + " has zero variance");
      const double t = std::fabs(mean) / std::sqrt(var / nd);
      const double pv = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
      p[b * m + c] = std::clamp(pv, std::numeric_limits<double>::min(), 1.0);
    }
  }
  return p;
}

std::vector<CellResult> run_cell(const SimulationCell& cell, std::size_t threads) {
  const std::size_t k = cell.combiners.size();
  const std::size_t active = active_count(cell);
  const double mu = calibrate_signal(cell.n, cell.alpha, cell.beta);
  IndexSet active_set(active), inactive_set(cell.m - active);
  for (std::size_t i = 0; i < cell.m; ++i) (i < active ? active_set[i] : inactive_set[i - active]) = i;
  std::vector<Combiner> combiners;
  for (const auto& c : cell.combiners) combiners.push_back(parse_combiner(c));

  struct Outcome {
    bool ok = false;
    double tdp = 0.0;
    bool family_error = false;
    double seconds = 0.0;
    std::string error;
  };
  std::vector<Outcome> outcomes(cell.reps * k);
  const TestConfig cfg(cell.alpha, cell.b_count);

  const auto one_rep = [&](std::size_t rep) {
    std::vector<double> p;
    try {
      const Replicate data = generate(cell, rep, mu);
      p = sign_flip_pvalues(data.data, cell.b_count, derive_seed(cell.seed, 2 * rep + 1));
    } catch (const std::exception& e) {
      for (std::size_t j = 0; j < k; ++j) outcomes[rep * k + j].error = e.what();
      return;
    }
    const StatisticMatrix pmat(cell.b_count, cell.m, p);
    for (std::size_t j = 0; j < k; ++j) {
      Outcome& o = outcomes[rep * k + j];
      try {
        StatisticMatrix stats = apply_combiner(pmat, combiners[j]);
        EngineOptions opt;
        opt.budget = cell.budget;
        if (cell.p_star) {
          opt.reduce = true;
          opt.t_ring = combiners[j](cell.p_ground);
          stats = truncate(stats, {combiners[j](*cell.p_star), opt.t_ring});
        }
        const DiscoveryEngine engine(stats, cell.alpha, opt);
        if (!active_set.empty()) {
          const auto start = std::chrono::steady_clock::now();
          const DiscoveryBound d = engine.discover(active_set);
          o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          o.tdp = d.tdp;
        }
        if (!inactive_set.empty()) {
          // d(N) > 0 exactly when phi(|N|) = 1 on N.
          const std::size_t z = inactive_set.size();
          Verdict v;
          if (opt.reduce) {
            const ReducedProblem red = reduce(stats, inactive_set, opt.t_ring);
            v = evaluate_phi_iterative(center(red.matrix), red.query, z, BranchBudget::unlimited(), cfg).value;
          } else {
            v = evaluate_phi_iterative(engine.centered(), inactive_set, z, BranchBudget::unlimited(), cfg).value;
          }
          o.family_error = v == Verdict::One;
        }
        o.ok = true;
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    }
  };

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t rep = next++; rep < cell.reps; rep = next++) one_rep(rep);
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::clamp<std::size_t>(threads, 1, cell.reps); ++t) pool.emplace_back(work);
    work();
  }

  std::vector<CellResult> results;
  for (std::size_t j = 0; j < k; ++j) {
    CellResult r;
    r.cell = cell;
    r.combiner = combiners[j].name();
    r.mu = mu;
    r.active = active;
    double sum = 0.0, sum_sq = 0.0, secs = 0.0;
    std::size_t errors = 0;
    for (std::size_t rep = 0; rep < cell.reps; ++rep) {
      const Outcome& o = outcomes[rep * k + j];
      if (!o.ok) {
        ++r.failures;
        r.last_error = o.error;
        continue;
      }
      ++r.reps;
      sum += o.tdp;
      sum_sq += o.tdp * o.tdp;
      secs += o.seconds;
      errors += o.family_error;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double reps = static_cast<double>(r.reps);
    if (r.reps > 0 && active > 0) {
      r.mean_tdp = sum / reps;
      const double var = r.reps > 1 ? std::max(0.0, (sum_sq - reps * r.mean_tdp * r.mean_tdp) / (reps - 1.0)) : 0.0;
      r.se_tdp = std::sqrt(var / reps);
      r.mean_seconds = secs / reps;
    } else {
      r.mean_tdp = r.se_tdp = r.mean_seconds = nan;
    }
    r.fwer = r.reps > 0 && active < cell.m ? static_cast<double>(errors) / reps : nan;
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<CellResult> run_grid(const SimulationConfig& cfg) {
  cfg.validate();
  std::vector<CellResult> out;
  for (const auto& cell : cfg.cells()) {
    try {
      auto rows = run_cell(cell, cfg.threads);
      out.insert(out.end(), rows.begin(), rows.end());
    } catch (const std::exception& e) {
      for (const auto& c : cell.combiners) {
        CellResult r;
        r.cell = cell;
        r.combiner = c;
        r.failures = cell.reps;
        r.last_error = e.what();
        r.mean_tdp = r.se_tdp = r.fwer = r.mean_seconds = std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<CellResult>& results) {
  const auto num = [](double x) { return std::isnan(x) ? std::string() : format_double(x); };
  out << "n,m,a,beta,rho,alpha,B,p_star,p_ground,combiner,mu,active,reps,failures,mean_tdp,se_tdp,fwer,"
         "mean_seconds,error\n";
  for (const auto& r : results) {
    const auto& c = r.cell;
    std::string err = r.last_error;
    std::replace(err.begin(), err.end(), '"', '\'');
    out << c.n << ',' << c.m << ',' << num(c.a) << ',' << num(c.beta) << ',' << num(c.rho) << ','
        << num(c.alpha) << ',' << c.b_count << ',' << (c.p_star ? format_double(*c.p_star) : "") << ','
        << num(c.p_ground) << ',' << r.combiner << ',' << num(r.mu) << ',' << r.active << ',' << r.reps << ','
        << r.failures << ',' << num(r.mean_tdp) << ',' << num(r.se_tdp) << ',' << num(r.fwer) << ','
        << num(r.mean_seconds) << ",\"" << err << "\"\n";
  }
}

}  // namespace sumtdp

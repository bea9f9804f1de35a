#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sumtdp/generators.hpp"
#include "sumtdp/inference.hpp"

namespace sumtdp {

/// One grid point of the simulation study. Truncation acts on the p-value
/// scale: p-values above p_star are replaced by p_ground before combining.
struct SimulationCell {
  std::size_t n = 50;
  std::size_t m = 100;
  double a = 0.2;
  double beta = 0.95;
  double rho = 0.0;
  double alpha = 0.05;
  std::size_t b_count = 200;
  std::optional<double> p_star;
  double p_ground = 0.5;
  std::size_t reps = 200;
  std::vector<std::string> combiners{"fisher"};
  std::uint64_t seed = 1;
  BranchBudget budget = BranchBudget::unlimited();
};

/// A grid: every listed value of a, beta, rho and p_star is crossed with the
/// others; the remaining fields are shared.
struct SimulationConfig {
  SimulationCell base;
  std::vector<double> a{0.2};
  std::vector<double> beta{0.95};
  std::vector<double> rho{0.0};
  std::vector<std::optional<double>> p_star{std::nullopt};
  std::size_t threads = 1;

  std::vector<SimulationCell> cells() const;
  void validate() const;
};

/// Reads the JSON form; unknown keys are rejected.
SimulationConfig load_simulation_config(std::istream& in);
SimulationConfig load_simulation_config_file(const std::string& path);
/// The JSON form with every field filled in.
std::string simulation_config_json(const SimulationConfig& cfg);

/// Shift mu (unit noise) at which the two-sided one-sample t test at level
/// alpha with n observations has power beta.
double calibrate_signal(std::size_t n, double alpha, double beta);

/// Two-sided one-sample t power at shift mu (unit noise).
double t_test_power(std::size_t n, double alpha, double mu);

struct Replicate {
  RawData data;
  std::size_t active = 0;  // the first `active` columns carry the signal
};

/// Data of replication `rep`: rows are independent, columns equicorrelated.
/// The signal defaults to calibrate_signal for the cell.
Replicate generate(const SimulationCell& cell, std::size_t rep, std::optional<double> signal = std::nullopt);

/// B x m two-sided t p-values, row 0 observed, rows 1.. under random sign flips.
std::vector<double> sign_flip_pvalues(const RawData& data, std::size_t b_count, std::uint64_t seed);

struct CellResult {
  SimulationCell cell;
  std::string combiner;
  double mu = 0.0;
  std::size_t active = 0;
  std::size_t reps = 0;
  std::size_t failures = 0;
  double mean_tdp = 0.0;
  double se_tdp = 0.0;
  double fwer = 0.0;
  double mean_seconds = 0.0;
  std::string last_error;
};

/// One result per combiner of the cell. All combiners see the same data.
std::vector<CellResult> run_cell(const SimulationCell& cell, std::size_t threads = 1);
std::vector<CellResult> run_grid(const SimulationConfig& cfg);

void write_results_csv(std::ostream& out, const std::vector<CellResult>& results);

}  // namespace sumtdp

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vset {

/// Monte Carlo model: latent scores sit at tau + gamma for members and
/// tau - gamma for non-members; the estimator adds independent Gaussian
/// noise with standard deviation sigma/sqrt(n) per code; prediction
/// thresholds the noisy score at tau (ties classify positive).
struct TheoryConfig {
  std::int64_t universe_size = 1000;  // N
  int pool_size = 50;                 // K
  int positives = 5;                  // s, members per query
  double gamma = 0.3;
  double tau = 0.0;
  double sigma = 1.0;
  int sample_count = 100;  // n
  double eps_ret = 0.0;
  double delta = 0.05;
  int trials = 10000;
  std::uint64_t seed = 1;
  // Above this N the background non-members are handled in closed form;
  // the O(N) exact path remains for smaller universes.
  std::int64_t exact_path_max_n = 10000;
};

TheoryConfig theory_config_from_json(const nlohmann::json& j);
nlohmann::json theory_config_to_json(const TheoryConfig& c);
void validate_theory_config(const TheoryConfig& c);

struct TrialOutcome {
  bool direct_success = false;
  bool rasc_success = false;
  bool retrieval_hit = false;  // Y(q) fully contained in C(q)
};

/// One coupled trial: both predictors share the same noise draws, so a
/// direct success with full retrieval implies a RASC success.
TrialOutcome simulate_trial(const TheoryConfig& config,
                            std::uint64_t trial_index);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

WilsonInterval wilson_interval(std::size_t failures, std::size_t trials,
                               double z = 1.959963984540054);

struct TheoryResult {
  TheoryConfig config;
  double p_fail_direct_mc = 0.0;
  double p_fail_rasc_mc = 0.0;
  WilsonInterval direct_interval;
  WilsonInterval rasc_interval;
  // Analytic Theorem-style bounds; reported uncapped and flagged vacuous
  // when >= 1.
  double bound_direct = 0.0;
  double bound_rasc = 0.0;
  long n_required_direct = 0;
  long n_required_rasc = -1;  // -1 when delta <= eps_ret (infeasible)
  long dominance_violations = 0;
};

TheoryResult estimate_recovery(const TheoryConfig& config);

/// ceil((2 sigma^2 / gamma^2) * ln(2N / delta))
long n_required_direct(double universe_size, double delta, double sigma,
                       double gamma);

/// ceil((2 sigma^2 / gamma^2) * ln(2K / (delta - eps_ret)));
/// throws InfeasibleTarget when delta <= eps_ret.
long n_required_rasc(double pool_size, double delta, double eps_ret,
                     double sigma, double gamma);

nlohmann::json theory_result_to_json(const TheoryResult& r);
std::string theory_csv_header();
std::string theory_csv_row(const TheoryResult& r);

/// Runs the config at each n in `n_grid` (or just config.sample_count when
/// the grid is empty) and writes one CSV row per run.
void run_theory_sweep(const TheoryConfig& config,
                      const std::vector<int>& n_grid,
                      const std::filesystem::path& out_csv);

}  // namespace vset

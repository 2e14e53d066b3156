// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/theory.hpp"

#include <cmath>

#include "vset/error.hpp"
#include "vset/io_util.hpp"
#include "vset/rng.hpp"

namespace vset {

using nlohmann::json;

TheoryConfig theory_config_from_json(const json& j) {
  TheoryConfig c;
  c.universe_size = j.value("N", c.universe_size);
  c.pool_size = j.value("K", c.pool_size);
  c.positives = j.value("s", c.positives);
  c.gamma = j.value("gamma", c.gamma);
  c.tau = j.value("tau", c.tau);
  c.sigma = j.value("sigma", c.sigma);
  c.sample_count = j.value("n", c.sample_count);
  c.eps_ret = j.value("eps_ret", c.eps_ret);
  c.delta = j.value("delta", c.delta);
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.exact_path_max_n = j.value("exact_path_max_n", c.exact_path_max_n);
  return c;
}

json theory_config_to_json(const TheoryConfig& c) {
  return json{{"N", c.universe_size}, {"K", c.pool_size},
              {"s", c.positives},     {"gamma", c.gamma},
              {"tau", c.tau},         {"sigma", c.sigma},
              {"n", c.sample_count},  {"eps_ret", c.eps_ret},
              {"delta", c.delta},     {"trials", c.trials},
              {"seed", c.seed},       {"exact_path_max_n", c.exact_path_max_n}};
}

void validate_theory_config(const TheoryConfig& c) {
  if (c.positives < 1 || c.positives > c.pool_size ||
      static_cast<std::int64_t>(c.pool_size) > c.universe_size) {
    throw Error(Errc::kInvalidConfig, "need 0 < s <= K <= N");
  }
  if (c.gamma <= 0.0 || c.sigma <= 0.0 || c.sample_count < 1 ||
      c.trials < 1 || c.eps_ret < 0.0 || c.eps_ret >= 1.0 ||
      c.delta <= 0.0 || c.delta >= 1.0) {
    throw Error(Errc::kInvalidConfig, "bad theory parameters");
  }
}

TrialOutcome simulate_trial(const TheoryConfig& config,
                            std::uint64_t trial_index) {
  Rng rng(splitmix64(config.seed ^ splitmix64(trial_index + 1)));

  // Noise threshold: a member classifies correctly iff its standard
  // normal draw g satisfies g >= -c, a non-member iff g < c, where
  // c = gamma * sqrt(n) / sigma. Equality at tau classifies positive,
  // a probability-zero event for the member side.
  const double c = config.gamma *
                   std::sqrt(static_cast<double>(config.sample_count)) /
                   config.sigma;

  const bool miss = rng.uniform() < config.eps_ret;

  // Members of Y(q); all live in U, and all but possibly one in C(q).
  bool members_ok = true;
  for (int i = 0; i < config.positives; ++i) {
    if (rng.normal() < -c) members_ok = false;
  }

  // Non-members placed into the pool: K - s, plus the backfill for a
  // dropped member on a retrieval miss.
  const int pool_negatives = config.pool_size - config.positives +
                             (miss ? 1 : 0);
  bool pool_negatives_ok = true;
  for (int i = 0; i < pool_negatives; ++i) {
    if (rng.normal() >= c) pool_negatives_ok = false;
  }

  // Background non-members outside the pool, direct predictor only.
  const std::int64_t background = config.universe_size - config.positives -
                                  static_cast<std::int64_t>(pool_negatives);
  bool background_ok = true;
  if (background > 0) {
    if (config.universe_size <= config.exact_path_max_n) {
      for (std::int64_t i = 0; i < background; ++i) {
        if (rng.normal() >= c) background_ok = false;
      }
    } else {
      // i.i.d. non-members: P(all classify correctly) = Phi(c)^B, drawn
      // as one Bernoulli. log1p keeps the tiny tail mass accurate.
      const double tail = 0.5 * std::erfc(c / std::sqrt(2.0));
      const double log_p_all =
          static_cast<double>(background) * std::log1p(-tail);
      background_ok = rng.uniform() < std::exp(log_p_all);
    }
  }

  TrialOutcome out;
  out.retrieval_hit = !miss;
  out.direct_success = members_ok && pool_negatives_ok && background_ok;
  out.rasc_success = !miss && members_ok && pool_negatives_ok;
  return out;
}

WilsonInterval wilson_interval(std::size_t failures, std::size_t trials,
                               double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval out{std::max(0.0, center - half),
                     std::min(1.0, center + half)};
  if (failures == 0) out.lo = 0.0;      // exact endpoints, no FP residue
  if (failures == trials) out.hi = 1.0;
  return out;
}

TheoryResult estimate_recovery(const TheoryConfig& config) {
  validate_theory_config(config);

  TheoryResult result;
  result.config = config;

  std::size_t fail_direct = 0;
  std::size_t fail_rasc = 0;
  long violations = 0;
  for (int t = 0; t < config.trials; ++t) {
    const TrialOutcome o =
        simulate_trial(config, static_cast<std::uint64_t>(t));
    if (!o.direct_success) ++fail_direct;
    if (!o.rasc_success) ++fail_rasc;
    if (o.retrieval_hit && o.direct_success && !o.rasc_success) ++violations;
  }

  const auto trials = static_cast<std::size_t>(config.trials);
  result.p_fail_direct_mc =
      static_cast<double>(fail_direct) / static_cast<double>(trials);
  result.p_fail_rasc_mc =
      static_cast<double>(fail_rasc) / static_cast<double>(trials);
  result.direct_interval = wilson_interval(fail_direct, trials);
  result.rasc_interval = wilson_interval(fail_rasc, trials);
  result.dominance_violations = violations;

  const double exponent =
      -static_cast<double>(config.sample_count) * config.gamma * config.gamma /
      (2.0 * config.sigma * config.sigma);
  result.bound_direct =
      2.0 * static_cast<double>(config.universe_size) * std::exp(exponent);
  result.bound_rasc =
      config.eps_ret +
      2.0 * static_cast<double>(config.pool_size) * std::exp(exponent);

  result.n_required_direct =
      n_required_direct(static_cast<double>(config.universe_size),
                        config.delta, config.sigma, config.gamma);
  result.n_required_rasc =
      config.delta > config.eps_ret
          ? n_required_rasc(static_cast<double>(config.pool_size),
                            config.delta, config.eps_ret, config.sigma,
                            config.gamma)
          : -1;
  return result;
}

long n_required_direct(double universe_size, double delta, double sigma,
                       double gamma) {
  if (delta <= 0.0 || delta >= 1.0 || sigma <= 0.0 || gamma <= 0.0 ||
      universe_size < 1.0) {
    throw Error(Errc::kInvalidConfig, "n_required_direct parameters");
  }
  return static_cast<long>(std::ceil(2.0 * sigma * sigma / (gamma * gamma) *
                                     std::log(2.0 * universe_size / delta)));
}

long n_required_rasc(double pool_size, double delta, double eps_ret,
                     double sigma, double gamma) {
  if (delta <= 0.0 || delta >= 1.0 || sigma <= 0.0 || gamma <= 0.0 ||
      pool_size < 1.0 || eps_ret < 0.0) {
    throw Error(Errc::kInvalidConfig, "n_required_rasc parameters");
  }
  if (delta <= eps_ret) {
    throw Error(Errc::kInfeasibleTarget,
                "delta <= eps_ret: retrieval misses set a hard floor");
  }
  return static_cast<long>(
      std::ceil(2.0 * sigma * sigma / (gamma * gamma) *
                std::log(2.0 * pool_size / (delta - eps_ret))));
}

json theory_result_to_json(const TheoryResult& r) {
  return json{{"config", theory_config_to_json(r.config)},
              {"p_fail_direct_mc", r.p_fail_direct_mc},
              {"p_fail_rasc_mc", r.p_fail_rasc_mc},
              {"direct_interval", {r.direct_interval.lo, r.direct_interval.hi}},
              {"rasc_interval", {r.rasc_interval.lo, r.rasc_interval.hi}},
              {"bound_direct", r.bound_direct},
              {"bound_direct_vacuous", r.bound_direct >= 1.0},
              {"bound_rasc", r.bound_rasc},
              {"bound_rasc_vacuous", r.bound_rasc >= 1.0},
              {"n_required_direct", r.n_required_direct},
              {"n_required_rasc", r.n_required_rasc},
              {"dominance_violations", r.dominance_violations}};
}

std::string theory_csv_header() {
  return "N,K,s,gamma,tau,sigma,n,eps_ret,delta,trials,seed,"
         "p_fail_direct,p_fail_direct_lo,p_fail_direct_hi,"
         "p_fail_rasc,p_fail_rasc_lo,p_fail_rasc_hi,"
         "bound_direct,bound_rasc,n_required_direct,n_required_rasc,"
         "dominance_violations";
}

std::string theory_csv_row(const TheoryResult& r) {
  const TheoryConfig& c = r.config;
  std::string row;
  row += std::to_string(c.universe_size) + ",";
  row += std::to_string(c.pool_size) + ",";
  row += std::to_string(c.positives) + ",";
  row += format_double(c.gamma) + ",";
  row += format_double(c.tau) + ",";
  row += format_double(c.sigma) + ",";
  row += std::to_string(c.sample_count) + ",";
  row += format_double(c.eps_ret) + ",";
  row += format_double(c.delta) + ",";
  row += std::to_string(c.trials) + ",";
  row += std::to_string(c.seed) + ",";
  row += format_double(r.p_fail_direct_mc) + ",";
  row += format_double(r.direct_interval.lo) + ",";
  row += format_double(r.direct_interval.hi) + ",";
  row += format_double(r.p_fail_rasc_mc) + ",";
  row += format_double(r.rasc_interval.lo) + ",";
  row += format_double(r.rasc_interval.hi) + ",";
  row += format_double(r.bound_direct) + ",";
  row += format_double(r.bound_rasc) + ",";
  row += std::to_string(r.n_required_direct) + ",";
  row += std::to_string(r.n_required_rasc) + ",";
  row += std::to_string(r.dominance_violations);
  return row;
}

void run_theory_sweep(const TheoryConfig& config,
                      const std::vector<int>& n_grid,
                      const std::filesystem::path& out_csv) {
  std::string out = theory_csv_header() + "\n";
  if (n_grid.empty()) {
    out += theory_csv_row(estimate_recovery(config)) + "\n";
  } else {
    for (int n : n_grid) {
      TheoryConfig c = config;
      c.sample_count = n;
      out += theory_csv_row(estimate_recovery(c)) + "\n";
    }
  }
  write_file_atomic(out_csv, out);
}

}  // namespace vset

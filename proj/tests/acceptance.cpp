// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors
//
// Acceptance suite: runs every release gate and prints one line per
// criterion. Exits nonzero if any gate fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "vset/corpus.hpp"
#include "vset/embed.hpp"
#include "vset/eval.hpp"
#include "vset/features.hpp"
#include "vset/index.hpp"
#include "vset/io_util.hpp"
#include "vset/model.hpp"
#include "vset/pipeline.hpp"
#include "vset/pool.hpp"
#include "vset/rng.hpp"
#include "vset/split.hpp"
#include "vset/theory.hpp"

using namespace vset;
using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------
// Criterion 1 & 2 share the theory sweep grid.

struct SweepPoint {
  std::int64_t N;
  int K;
  double gamma;
};

std::vector<SweepPoint> sweep_grid() {
  std::vector<SweepPoint> grid;
  for (std::int64_t N : {1000LL, 10000LL, 100000LL}) {
    for (int K : {50, 100}) {
      for (double gamma : {0.1, 0.3}) {
        grid.push_back({N, K, gamma});
      }
    }
  }
  return grid;
}

TheoryConfig sweep_config(const SweepPoint& p, int n, int trials,
                          std::uint64_t seed) {
  TheoryConfig c;
  c.universe_size = p.N;
  c.pool_size = p.K;
  c.positives = 5;
  c.gamma = p.gamma;
  c.tau = 0.0;
  c.sigma = 1.0;
  c.sample_count = n;
  c.eps_ret = 0.0;
  c.delta = 0.05;
  c.trials = trials;
  c.seed = seed;
  return c;
}

void criterion_theory_bounds() {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& p : sweep_grid()) {
    // n near the crossover region: a bit below the RASC requirement.
    const int n = static_cast<int>(
        0.8 * static_cast<double>(
                  n_required_rasc(static_cast<double>(p.K), 0.05, 0.0, 1.0,
                                  p.gamma)));
    const auto r = estimate_recovery(sweep_config(p, n, 10000, 17));
    require(r.direct_interval.hi <= r.bound_direct + 1e-12,
            "direct bound violated at N=" + std::to_string(p.N));
    require(r.rasc_interval.hi <= r.bound_rasc + 1e-12,
            "rasc bound violated at N=" + std::to_string(p.N));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  require(secs < 120.0, "sweep took " + fmt(secs) + "s (budget 120s)");
  std::cout << "  bounds hold across " << sweep_grid().size()
            << " configs in " << fmt(secs) << "s\n";
}

void criterion_sample_complexity_gap() {
  require(n_required_direct(1e5, 0.05, 1.0, 0.2) == 761,
          "n_required_direct(1e5) != 761");
  require(n_required_rasc(100, 0.05, 0.0, 1.0, 0.2) == 415,
          "n_required_rasc(100) != 415");

  for (const auto& p : sweep_grid()) {
    const long n_dir = n_required_direct(static_cast<double>(p.N), 0.05, 1.0,
                                         p.gamma);
    const long n_rasc = n_required_rasc(static_cast<double>(p.K), 0.05, 0.0,
                                        1.0, p.gamma);

    // Failure at the required n stays within delta + 2 MC standard errors.
    {
      auto c = sweep_config(p, static_cast<int>(n_dir), 10000, 29);
      const auto r = estimate_recovery(c);
      const double se = std::sqrt(
          std::max(r.p_fail_direct_mc * (1 - r.p_fail_direct_mc), 1e-9) /
          c.trials);
      require(r.p_fail_direct_mc <= 0.05 + 2 * se,
              "direct failure too high at its required n");
    }
    {
      auto c = sweep_config(p, static_cast<int>(n_rasc), 10000, 31);
      const auto r = estimate_recovery(c);
      const double se = std::sqrt(
          std::max(r.p_fail_rasc_mc * (1 - r.p_fail_rasc_mc), 1e-9) /
          c.trials);
      require(r.p_fail_rasc_mc <= 0.05 + 2 * se,
              "rasc failure too high at its required n");
    }

    // Crossover curves: RASC reaches 95% recovery strictly earlier.
    if (static_cast<std::int64_t>(p.K) >= p.N) continue;
    std::vector<int> grid;
    const double lo = 0.45 * static_cast<double>(n_rasc);
    const double hi = 1.25 * static_cast<double>(n_dir);
    for (int i = 0; i < 12; ++i) {
      grid.push_back(static_cast<int>(
          lo * std::pow(hi / lo, static_cast<double>(i) / 11.0)));
    }
    long first_rasc = -1, first_dir = -1;
    for (int n : grid) {
      auto c = sweep_config(p, n, 10000, 37);
      c.exact_path_max_n = 1;  // closed-form path (cross-checked elsewhere)
      const auto r = estimate_recovery(c);
      if (first_rasc < 0 && r.p_fail_rasc_mc <= 0.05) first_rasc = n;
      if (first_dir < 0 && r.p_fail_direct_mc <= 0.05) first_dir = n;
    }
    require(first_rasc > 0, "rasc never reached 95% recovery on the grid");
    require(first_dir > 0, "direct never reached 95% recovery on the grid");
    require(first_rasc < first_dir,
            "rasc crossover not strictly earlier (N=" + std::to_string(p.N) +
                " K=" + std::to_string(p.K) + " gamma=" + fmt(p.gamma) + ")");
  }
  std::cout << "  761/415 reproduced; rasc crosses 95% recovery first on "
               "every config\n";
}

void criterion_coupled_dominance() {
  long total_trials = 0;
  long violations = 0;
  for (double eps : {0.0, 0.3}) {
    TheoryConfig c;
    c.universe_size = 100000;
    c.pool_size = 100;
    c.positives = 5;
    c.gamma = 0.3;
    c.sigma = 1.0;
    c.sample_count = 90;  // noisy: both predictors fail often
    c.eps_ret = eps;
    c.delta = 0.5;
    c.trials = 60000;
    c.seed = 101 + static_cast<std::uint64_t>(eps * 10);
    const auto r = estimate_recovery(c);
    total_trials += c.trials;
    violations += r.dominance_violations;
  }
  require(total_trials >= 100000, "need at least 1e5 coupled trials");
  require(violations == 0,
          std::to_string(violations) + " dominance violations");
  std::cout << "  0 violations across " << total_trials
            << " coupled trials\n";
}

// Brute-force oracles, independent of src/eval.cpp.
double auroc_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  double good = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) good += 1.0;
      else if (s[i] == s[j]) good += 0.5;
    }
  }
  return good / static_cast<double>(pairs);
}

double ap_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<std::size_t> order(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    return a < b;
  });
  double total_pos = 0;
  for (int v : y) total_pos += v;
  double ap = 0.0, tp = 0.0, prev_r = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    tp += y[order[k]];
    const double r = tp / total_pos;
    ap += (r - prev_r) * (tp / static_cast<double>(k + 1));
    prev_r = r;
  }
  return ap;
}

void criterion_metric_oracles() {
  Rng rng(2024);
  int done = 0;
  while (done < 1000) {
    const std::size_t n = 2 + rng.uniform_int(99);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Heavy quantization produces tied scores routinely.
      s[i] = std::round(rng.uniform() * 6.0) / 6.0;
      y[i] = rng.uniform() < 0.25 ? 1 : 0;
    }
    if (done % 7 == 0) {
      // Single-positive edge case.
      for (auto& v : y) v = 0;
      y[rng.uniform_int(n)] = 1;
    }
    std::size_t pos = 0;
    for (int v : y) pos += static_cast<std::size_t>(v);
    if (pos == 0 || pos == n) continue;

    require(std::abs(auroc(s, y) - auroc_oracle(s, y)) <= 1e-12,
            "auroc mismatch vs oracle");
    require(std::abs(average_precision(s, y) - ap_oracle(s, y)) <= 1e-12,
            "average precision mismatch vs oracle");
    ++done;
  }
  std::cout << "  auroc/ap match oracles to 1e-12 on 1000 instances\n";
}

void criterion_gradient_check() {
  const std::vector<Eigen::Index> dims = {13, 8, 5, 3, 1};
  double worst = 0.0;
  for (int batch_i = 0; batch_i < 20; ++batch_i) {
    MLPModel model = init_model(dims, 500 + batch_i);
    Rng rng(900 + batch_i);
    const Eigen::Index rows = 6 + static_cast<Eigen::Index>(rng.uniform_int(20));
    RowMatrixXd x(rows, dims.front());
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < dims.front(); ++c) x(r, c) = rng.normal();
      y[r] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
    const double w = 1.0 + 2.0 * rng.uniform();

    ForwardCache cache;
    const auto probs = forward_train(model, x, nullptr, cache, false);
    const auto bce = weighted_bce_loss(probs, y, w);
    const Gradients g = backward(model, cache, bce.dlogits);

    auto loss_now = [&]() {
      ForwardCache c2;
      const auto p2 = forward_train(model, x, nullptr, c2, false);
      return weighted_bce_loss(p2, y, w).loss;
    };
    auto check_param = [&](double* p, double analytic) {
      const double orig = *p;
      const double h = 1e-5 * std::max(1.0, std::abs(orig));
      *p = orig + h;
      const double up = loss_now();
      *p = orig - h;
      const double down = loss_now();
      *p = orig;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(analytic - fd) /
                         std::max(std::abs(analytic) + std::abs(fd), 1e-8);
      worst = std::max(worst, rel);
    };

    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      for (Eigen::Index r = 0; r < model.weights[l].rows(); ++r) {
        for (Eigen::Index c = 0; c < model.weights[l].cols(); ++c) {
          check_param(&model.weights[l](r, c), g.weights[l](r, c));
        }
      }
      for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) {
        check_param(&model.biases[l][i], g.biases[l][i]);
      }
    }
    for (std::size_t l = 0; l < model.bn_scale.size(); ++l) {
      for (Eigen::Index i = 0; i < model.bn_scale[l].size(); ++i) {
        check_param(&model.bn_scale[l][i], g.bn_scale[l][i]);
        check_param(&model.bn_shift[l][i], g.bn_shift[l][i]);
      }
    }
  }
  require(worst <= 1e-4,
          "max gradient relative error " + fmt(worst) + " > 1e-4");
  std::cout << "  max relative gradient error " << fmt(worst)
            << " over 20 batches\n";
}

void criterion_architecture_fidelity() {
  require(mlp_parameter_count({1545, 512, 256, 64, 1}) == 941057,
          "parameter count != 941057");

  CandidatePool pool;
  pool.target_oid = "t";
  pool.target_title = "some value set";
  pool.target_size = 3;
  pool.entries.push_back({"1", "SNOMED-CT", "some code", 0.5, "s", 1});
  HashEmbedder embedder(768);
  const auto titles = embed_unique_strings({pool.target_title}, embedder);
  const auto displays = embed_unique_strings({"some code"}, embedder);
  const auto fm = assemble_pool_features(pool, pool.target_title, titles,
                                         displays);
  require(fm.x.cols() == 1545, "feature length != 1545 at d=768");
  std::cout << "  941,057 parameters; 1545-dimensional features\n";
}

// Shared small pipeline corpus for criteria 7, 9, 10.
struct SmallPipeline {
  std::vector<ValueSet> sets;
  std::vector<CandidatePool> pools;
  SplitManifest manifest;
};

SmallPipeline build_small_pipeline() {
  SynthConfig synth;
  synth.topic_count = 12;
  synth.sets_per_topic = 25;
  synth.seed = 301;
  synth.size_log_mean = 1.8;
  synth.size_log_sigma = 0.5;
  synth.catalog_size = 40;

  SmallPipeline out;
  out.sets = generate_synthetic_corpus(synth);

  HashEmbedder embedder(32);
  std::vector<std::string> title_strings;
  for (const auto& vs : out.sets) title_strings.push_back(vs.title);
  const auto titles = embed_unique_strings(title_strings, embedder);
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& vs : out.sets) entries.emplace_back(vs.oid, vs.title);
  const auto index = build_index(titles, entries);

  std::unordered_map<std::string, const ValueSet*> by_oid;
  for (const auto& vs : out.sets) by_oid.emplace(vs.oid, &vs);
  for (const auto& vs : out.sets) {
    const auto hits = query_top_k(index, titles.at(vs.title), 5, &vs.oid);
    std::vector<std::pair<const ValueSet*, double>> retrieved;
    for (const auto& h : hits) {
      retrieved.emplace_back(by_oid.at(h.oid), h.similarity);
    }
    out.pools.push_back(build_candidate_pool(vs, retrieved));
  }

  std::map<std::string, double> rr;
  for (const auto& p : out.pools) rr[p.target_oid] = p.rr_at_k;
  out.manifest = assign_splits(out.sets, {"Publisher-02"},
                               {0.70, 0.15, 0.15}, 13, rr);
  return out;
}

void criterion_definitional_identities(const SmallPipeline& sp) {
  const auto prfs = retrieval_only_baseline(sp.pools);

  // Macro recall equals mean RR@K exactly.
  double mean_rr = 0.0;
  for (const auto& p : sp.pools) mean_rr += p.rr_at_k;
  mean_rr /= static_cast<double>(sp.pools.size());
  const MacroBlock macro = macro_aggregate(prfs);
  require(std::abs(macro.recall - mean_rr) <= 1e-15,
          "retrieval-only macro recall != mean RR@K");
  for (std::size_t i = 0; i < sp.pools.size(); ++i) {
    require(prfs[i].recall == sp.pools[i].rr_at_k,
            "per-set retrieval-only recall != rr_at_k");
  }

  // Pair-level precision of the all-positive predictor is the positive
  // rate.
  std::size_t total = 0, positives = 0, tp_sum = 0, pred_sum = 0;
  for (std::size_t i = 0; i < sp.pools.size(); ++i) {
    total += sp.pools[i].entries.size();
    for (const auto& e : sp.pools[i].entries) {
      positives += static_cast<std::size_t>(e.label);
    }
    pred_sum += sp.pools[i].entries.size();
    tp_sum += static_cast<std::size_t>(
        std::llround(prfs[i].precision *
                     static_cast<double>(sp.pools[i].entries.size())));
  }
  const double rate = pool_positive_rate(sp.pools);
  require(std::abs(rate - static_cast<double>(positives) /
                              static_cast<double>(total)) <= 1e-15,
          "pool positive rate mismatch");
  require(std::abs(static_cast<double>(tp_sum) /
                       static_cast<double>(pred_sum) -
                   rate) <= 1e-12,
          "retrieval-only pair precision != pool positive rate");

  // Per-set recall never exceeds rr_at_k over randomized decisions.
  Rng rng(777);
  int checks = 0;
  while (checks < 10000) {
    const auto& pool = sp.pools[rng.uniform_int(sp.pools.size())];
    std::vector<char> decisions(pool.entries.size());
    const double keep = rng.uniform();
    for (auto& d : decisions) d = rng.uniform() < keep ? 1 : 0;
    const Prf prf = pool_decision_prf(pool, decisions);
    require(prf.recall <= pool.rr_at_k + 1e-12,
            "decision recall exceeded rr_at_k");
    ++checks;
  }
  std::cout << "  recall identity, precision identity, and the RR cap all "
               "hold\n";
}

void criterion_end_to_end_benchmark() {
  namespace fs = std::filesystem;
  const fs::path dir_a = fs::temp_directory_path() / "vset_accept_a";
  const fs::path dir_b = fs::temp_directory_path() / "vset_accept_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);

  const json config{
      {"source", "synth"},
      {"synth",
       {{"topic_count", 50},
        {"sets_per_topic", 40},  // 2,000 value sets
        {"seed", 1001},
        {"size_log_mean", 1.7917594692280547},  // ln 6
        {"size_log_sigma", 0.55},
        {"catalog_size", 48},
        {"popularity_alpha", 1.3},
        {"own_topic_fraction", 0.7},
        {"mixed_system_rate", 0.15}}},
      {"k", 10},
      {"dim", 768},
      {"split_seed", 13},
      {"holdout_publishers", {"Publisher-02"}},
      {"train",
       {{"batch_size", 2048},
        {"learning_rate", 3e-4},
        {"weight_decay", 1e-4},
        {"max_epochs", 12},
        {"early_stop_patience", 5},
        {"plateau_patience", 2},
        {"seed", 7}}}};

  const fs::path cfg_a = dir_a / "pipeline.json";
  const fs::path cfg_b = dir_b / "pipeline.json";
  {
    json ja = config;
    ja["workdir"] = dir_a.string();
    write_file_atomic(cfg_a, ja.dump(2));
    json jb = config;
    jb["workdir"] = dir_b.string();
    write_file_atomic(cfg_b, jb.dump(2));
  }

  auto run_cli = [](const fs::path& cfg) {
    const std::string cmd = std::string(VSET_CLI_PATH) + " run-all --config " +
                            cfg.string() + " > /dev/null 2> /dev/null";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };

  const auto start = std::chrono::steady_clock::now();
  require(run_cli(cfg_a) == 0, "run-all (first run) failed");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  require(secs < 900.0,
          "run-all took " + fmt(secs) + "s (budget 900s)");

  require(run_cli(cfg_b) == 0, "run-all (second run) failed");

  const std::string report_a = read_text_file(dir_a / "report.json");
  const std::string report_b = read_text_file(dir_b / "report.json");
  require(report_a == report_b, "reports differ between identical runs");

  const json report = json::parse(report_a);
  const double auroc_value = report.at("pair_level").at("auroc");
  const double f1_model =
      report.at("value_set_level").at("classifier").at("f1");
  const double f1_base =
      report.at("value_set_level").at("retrieval_only").at("f1");
  require(auroc_value >= 0.75,
          "pair-level AUROC " + fmt(auroc_value) + " < 0.75");
  require(f1_model - f1_base >= 0.05,
          "macro F1 gain " + fmt(f1_model - f1_base) + " < 0.05");
  std::cout << "  run-all in " << fmt(secs) << "s; AUROC "
            << fmt(auroc_value) << "; macro F1 " << fmt(f1_model) << " vs "
            << fmt(f1_base) << " baseline; byte-identical reports\n";
}

void criterion_hallucination(const SmallPipeline& sp) {
  const auto universe = build_universe(sp.sets);
  std::unordered_map<std::string, const ValueSet*> by_oid;
  for (const auto& vs : sp.sets) by_oid.emplace(vs.oid, &vs);

  // Constructed file: exactly 2 of 4 pairs outside the universe.
  {
    std::vector<PredictionSet> preds(1);
    preds[0].oid = sp.sets[0].oid;
    preds[0].predicted = {
        {sp.sets[0].codes[0].code, sp.sets[0].codes[0].system},
        {sp.sets[0].codes[1].code, sp.sets[0].codes[1].system},
        {"no-such-code-1", "SNOMED-CT"},
        {"no-such-code-2", "LOINC"}};
    const auto score = score_external_predictions(preds, by_oid, universe,
                                                  {sp.sets[0].oid});
    require(score.hallucination_rate == 0.5,
            "expected rate 0.5, got " + fmt(score.hallucination_rate));
  }

  // Pool-restricted predictions can never hallucinate.
  {
    std::vector<PredictionSet> preds;
    std::vector<std::string> oids;
    Rng rng(555);
    for (std::size_t i = 0; i < 50; ++i) {
      const auto& pool = sp.pools[rng.uniform_int(sp.pools.size())];
      PredictionSet ps;
      ps.oid = pool.target_oid;
      for (const auto& e : pool.entries) {
        if (rng.uniform() < 0.5) ps.predicted.emplace_back(e.code, e.system);
      }
      preds.push_back(std::move(ps));
      oids.push_back(pool.target_oid);
    }
    const auto score =
        score_external_predictions(preds, by_oid, universe, oids);
    require(score.hallucination_rate == 0.0,
            "pool-restricted predictions hallucinated");
  }
  std::cout << "  2/4 file scores 0.5; pool-grounded predictions score 0\n";
}

void criterion_split_integrity(const SmallPipeline& sp) {
  std::unordered_map<std::string, const ValueSet*> by_oid;
  for (const auto& vs : sp.sets) by_oid.emplace(vs.oid, &vs);

  std::set<std::string> seen;
  for (const auto& row : sp.manifest) {
    require(seen.insert(row.oid).second, "oid in two splits: " + row.oid);
    if (row.publisher == "Publisher-02") {
      require(row.split == Split::kTest,
              "held-out publisher set outside test");
    }
  }
  require(seen.size() == sp.sets.size(), "manifest row count mismatch");

  // Per-stratum largest-remainder tolerance.
  std::map<std::string, std::size_t> pub_counts;
  for (const auto& vs : sp.sets) {
    if (vs.publisher != "Publisher-02") ++pub_counts[vs.publisher];
  }
  std::map<std::pair<std::string, std::string>, std::map<Split, double>>
      strata;
  for (const auto& row : sp.manifest) {
    if (row.publisher == "Publisher-02") continue;
    const auto* vs = by_oid.at(row.oid);
    strata[{to_string(vs->vs_type), publisher_bin(vs->publisher, pub_counts)}]
        [row.split] += 1.0;
  }
  for (const auto& [key, counts] : strata) {
    double total = 0;
    for (const auto& [s, c] : counts) total += c;
    if (total < 3) continue;
    auto at = [&](Split s) {
      auto it = counts.find(s);
      return it == counts.end() ? 0.0 : it->second;
    };
    require(std::abs(at(Split::kTrain) - 0.70 * total) <= 2.0,
            "train fraction off in stratum " + key.first + "/" + key.second);
    require(std::abs(at(Split::kVal) - 0.15 * total) <= 2.0,
            "val fraction off in stratum " + key.first + "/" + key.second);
    require(std::abs(at(Split::kTest) - 0.15 * total) <= 2.0,
            "test fraction off in stratum " + key.first + "/" + key.second);
  }
  std::cout << "  holdout isolated; no oid duplicated; strata within "
               "rounding\n";
}

}  // namespace

int main() {
  const SmallPipeline sp = build_small_pipeline();

  struct Criterion {
    int id;
    const char* name;
    std::function<void()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "theory bounds hold across the sweep",
       [] { criterion_theory_bounds(); }},
      {2, "sample-complexity gap (761 vs 415) and crossover curves",
       [] { criterion_sample_complexity_gap(); }},
      {3, "coupled dominance has zero violations",
       [] { criterion_coupled_dominance(); }},
      {4, "auroc/ap equal brute-force oracles",
       [] { criterion_metric_oracles(); }},
      {5, "analytic gradients match finite differences",
       [] { criterion_gradient_check(); }},
      {6, "architecture fidelity (941,057 params; 1545 features)",
       [] { criterion_architecture_fidelity(); }},
      {7, "definitional identities of the retrieval-only baseline",
       [&] { criterion_definitional_identities(sp); }},
      {8, "end-to-end synthetic benchmark",
       [] { criterion_end_to_end_benchmark(); }},
      {9, "hallucination accounting",
       [&] { criterion_hallucination(sp); }},
      {10, "split integrity", [&] { criterion_split_integrity(sp); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    try {
      c.body();
      std::cout << "PASS criterion " << c.id << ": " << c.name << "\n";
    } catch (const std::exception& e) {
      std::cout << "FAIL criterion " << c.id << ": " << c.name << " — "
                << e.what() << "\n";
      ++failures;
    }
  }
  if (failures == 0) {
    std::cout << "acceptance: all " << criteria.size() << " criteria pass\n";
  } else {
    std::cout << "acceptance: " << failures << " criterion(s) failed\n";
  }
  return failures == 0 ? 0 : 1;
}

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "vset/corpus.hpp"
#include "vset/error.hpp"
#include "vset/io_util.hpp"
#include "vset/log.hpp"
#include "vset/model.hpp"
#include "vset/persistence.hpp"
#include "vset/pipeline.hpp"
#include "vset/theory.hpp"

namespace {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
  json j = json::parse(vset::read_text_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw vset::Error(vset::Errc::kConfigError,
                      path.string() + ": invalid JSON");
  }
  return j;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? std::string::npos
                                                     : comma - start);
    if (!tok.empty()) out.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vset: corpus-grounded value set completion"};
  app.require_subcommand(1);
  bool json_logs = false;
  app.add_flag("--json-logs", json_logs, "emit logs as JSON lines");

  // ingest
  std::string ingest_dir, ingest_out;
  auto* ingest = app.add_subcommand("ingest",
                                    "parse a directory of FHIR ValueSet "
                                    "expansions into a corpus file");
  ingest->add_option("--fhir-dir", ingest_dir)->required();
  ingest->add_option("--out", ingest_out)->required();

  // gen-synth
  std::string synth_config_path, synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* gensynth = app.add_subcommand("gen-synth",
                                      "generate a synthetic corpus");
  gensynth->add_option("--config", synth_config_path,
                       "synthetic generator config JSON");
  gensynth->add_option("--seed", synth_seed, "override the config seed");
  gensynth->add_option("--out", synth_out)->required();

  // stats
  std::string stats_corpus, stats_out;
  auto* stats = app.add_subcommand("stats", "corpus summary statistics");
  stats->add_option("--corpus", stats_corpus)->required();
  stats->add_option("--out", stats_out)->required();

  // embed
  std::string embed_corpus, embed_provider = "hash", embed_field = "both",
              embed_out, embed_table;
  Eigen::Index embed_dim = 768;
  auto* embed = app.add_subcommand("embed", "embed corpus strings");
  embed->add_option("--corpus", embed_corpus)->required();
  embed->add_option("--provider", embed_provider, "hash | file");
  embed->add_option("--field", embed_field, "titles | displays | both");
  embed->add_option("--dim", embed_dim);
  embed->add_option("--table", embed_table,
                    "source table for provider 'file'");
  embed->add_option("--out", embed_out)->required();

  // index
  std::string index_embs, index_corpus, index_out;
  auto* index = app.add_subcommand("index", "build the flat title index");
  index->add_option("--embs", index_embs)->required();
  index->add_option("--corpus", index_corpus)->required();
  index->add_option("--out", index_out)->required();

  // pool
  std::string pool_corpus, pool_index, pool_embs, pool_out;
  int pool_k = 10;
  auto* pool = app.add_subcommand("pool", "build candidate pools");
  pool->add_option("--corpus", pool_corpus)->required();
  pool->add_option("--index", pool_index)->required();
  pool->add_option("--embs", pool_embs)->required();
  pool->add_option("--k", pool_k);
  pool->add_option("--out", pool_out)->required();

  // split
  std::string split_corpus, split_pools, split_out;
  std::vector<std::string> split_holdout;
  std::uint64_t split_seed = 13;
  std::vector<double> split_ratios = {0.70, 0.15, 0.15};
  auto* split = app.add_subcommand("split", "assign train/val/test splits");
  split->add_option("--corpus", split_corpus)->required();
  split->add_option("--pools", split_pools)->required();
  split->add_option("--holdout", split_holdout,
                    "publisher held out entirely for test (repeatable)");
  split->add_option("--seed", split_seed);
  split->add_option("--ratios", split_ratios)->expected(3);
  split->add_option("--out", split_out)->required();

  // features
  std::string feat_pools, feat_titles, feat_displays, feat_out;
  auto* features = app.add_subcommand("features",
                                      "assemble per-pair feature vectors");
  features->add_option("--pools", feat_pools)->required();
  features->add_option("--title-embs", feat_titles)->required();
  features->add_option("--display-embs", feat_displays)->required();
  features->add_option("--out", feat_out)->required();

  // train
  std::string train_features, train_manifest, train_config_path, train_out;
  auto* train_cmd = app.add_subcommand("train", "train the MLP classifier");
  train_cmd->add_option("--features", train_features)->required();
  train_cmd->add_option("--manifest", train_manifest)->required();
  train_cmd->add_option("--config", train_config_path, "train config JSON");
  train_cmd->add_option("--out", train_out)->required();

  // eval
  std::string eval_model, eval_features, eval_pools, eval_manifest, eval_out;
  std::size_t eval_bin_threshold = 50;
  auto* eval_cmd = app.add_subcommand("eval",
                                      "evaluate the classifier on the test "
                                      "split");
  eval_cmd->add_option("--model", eval_model)->required();
  eval_cmd->add_option("--features", eval_features)->required();
  eval_cmd->add_option("--pools", eval_pools)->required();
  eval_cmd->add_option("--manifest", eval_manifest)->required();
  eval_cmd->add_option("--publisher-bin-threshold", eval_bin_threshold);
  eval_cmd->add_option("--out", eval_out)->required();

  // eval-predictions
  std::string pred_file, pred_corpus, pred_manifest, pred_out;
  std::size_t pred_bin_threshold = 50;
  auto* evalpred = app.add_subcommand(
      "eval-predictions",
      "score externally produced (code, system) prediction sets");
  evalpred->add_option("--predictions", pred_file)->required();
  evalpred->add_option("--corpus", pred_corpus)->required();
  evalpred->add_option("--manifest", pred_manifest)->required();
  evalpred->add_option("--publisher-bin-threshold", pred_bin_threshold);
  evalpred->add_option("--out", pred_out)->required();

  // simulate-theory
  std::string theory_config_path, theory_out, theory_sweep;
  auto* theory = app.add_subcommand(
      "simulate-theory",
      "Monte Carlo verification of the recovery bounds");
  theory->add_option("--config", theory_config_path)->required();
  theory->add_option("--sweep", theory_sweep,
                     "comma-separated grid of n values");
  theory->add_option("--out", theory_out)->required();

  // run-all
  std::string runall_config_path;
  std::optional<std::string> runall_workdir;
  std::optional<int> runall_k;
  std::optional<Eigen::Index> runall_dim;
  std::optional<std::uint64_t> runall_split_seed;
  bool runall_force = false;
  auto* runall = app.add_subcommand("run-all",
                                    "execute the full pipeline end to end");
  runall->add_option("--config", runall_config_path)->required();
  runall->add_option("--workdir", runall_workdir);
  runall->add_option("--k", runall_k);
  runall->add_option("--dim", runall_dim);
  runall->add_option("--split-seed", runall_split_seed);
  runall->add_flag("--force", runall_force, "ignore cached stage state");

  // inspect
  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect",
                                     "print an artifact file's header");
  inspect->add_option("file", inspect_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << e.what() << "\n";
    return 1;
  }

  vset::log::set_json(json_logs);

  try {
    if (*ingest) {
      vset::stage_ingest(ingest_dir, ingest_out);
    } else if (*gensynth) {
      vset::SynthConfig config;
      if (!synth_config_path.empty()) {
        config = vset::synth_config_from_json(load_json(synth_config_path));
      }
      if (synth_seed) config.seed = *synth_seed;
      vset::stage_gen_synth(config, synth_out);
    } else if (*stats) {
      vset::stage_stats(stats_corpus, stats_out);
    } else if (*embed) {
      vset::EmbedField field;
      if (embed_field == "titles") field = vset::EmbedField::kTitles;
      else if (embed_field == "displays") field = vset::EmbedField::kDisplays;
      else if (embed_field == "both") field = vset::EmbedField::kBoth;
      else {
        throw vset::Error(vset::Errc::kConfigError,
                          "--field must be titles, displays or both");
      }
      vset::stage_embed(embed_corpus, field, embed_provider, embed_dim,
                        embed_table.empty()
                            ? std::nullopt
                            : std::optional<std::filesystem::path>(embed_table),
                        embed_out);
    } else if (*index) {
      vset::stage_index(index_corpus, index_embs, index_out);
    } else if (*pool) {
      vset::stage_pool(pool_corpus, pool_index, pool_embs, pool_k, pool_out);
    } else if (*split) {
      vset::stage_split(split_corpus, split_pools, split_holdout,
                        {split_ratios[0], split_ratios[1], split_ratios[2]},
                        split_seed, split_out);
    } else if (*features) {
      vset::stage_features(feat_pools, feat_titles, feat_displays, feat_out);
    } else if (*train_cmd) {
      vset::TrainConfig config;
      if (!train_config_path.empty()) {
        config = vset::train_config_from_json(load_json(train_config_path));
      }
      vset::stage_train(train_features, train_manifest, config, train_out);
    } else if (*eval_cmd) {
      vset::stage_eval(eval_model, eval_features, eval_pools, eval_manifest,
                       eval_bin_threshold, eval_out);
    } else if (*evalpred) {
      vset::stage_eval_predictions(pred_file, pred_corpus, pred_manifest,
                                   pred_bin_threshold, pred_out);
    } else if (*theory) {
      const auto config =
          vset::theory_config_from_json(load_json(theory_config_path));
      std::vector<int> grid;
      if (!theory_sweep.empty()) {
        grid = parse_int_list(theory_sweep);
      } else {
        const json j = load_json(theory_config_path);
        if (j.contains("n_grid")) grid = j["n_grid"].get<std::vector<int>>();
      }
      vset::run_theory_sweep(config, grid, theory_out);
    } else if (*runall) {
      json j = load_json(runall_config_path);
      // Precedence: command line > config file > defaults.
      if (runall_workdir) j["workdir"] = *runall_workdir;
      if (runall_k) j["k"] = *runall_k;
      if (runall_dim) j["dim"] = *runall_dim;
      if (runall_split_seed) j["split_seed"] = *runall_split_seed;
      const auto config = vset::pipeline_config_from_json(j);
      const json summary = vset::run_all(config, runall_force);
      std::cout << summary.dump(2) << "\n";
    } else if (*inspect) {
      std::cout << vset::inspect_artifact(inspect_path).dump(2) << "\n";
    }
  } catch (const vset::Error& e) {
    vset::log::error(e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    vset::log::error(std::string("internal error: ") + e.what());
    return 3;
  }
  return 0;
}

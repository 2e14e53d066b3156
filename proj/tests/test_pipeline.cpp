// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "vset/error.hpp"
#include "vset/io_util.hpp"
#include "vset/pipeline.hpp"
#include "vset/split.hpp"

using namespace vset;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VSET_CLI_PATH) + " " + args +
                          " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

// Small, fast pipeline configuration for tests.
json tiny_config(const std::filesystem::path& workdir) {
  return json{{"workdir", workdir.string()},
              {"source", "synth"},
              {"synth",
               {{"topic_count", 6},
                {"sets_per_topic", 25},
                {"seed", 11},
                {"size_log_mean", 1.7},
                {"size_log_sigma", 0.5},
                {"catalog_size", 40},
                {"popularity_alpha", 1.2}}},
              {"k", 5},
              {"dim", 32},
              {"split_seed", 13},
              {"holdout_publishers", {"Publisher-02"}},
              {"train",
               {{"batch_size", 64},
                {"max_epochs", 3},
                {"learning_rate", 1e-3},
                {"seed", 3}}}};
}

}  // namespace

TEST_CASE("config validation aggregates every error") {
  json bad{{"source", "nope"}, {"k", 0}, {"dim", 4}};
  try {
    (void)pipeline_config_from_json(bad);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kConfigError);
    const std::string msg = e.what();
    CHECK(msg.find("source") != std::string::npos);
    CHECK(msg.find("k:") != std::string::npos);
    CHECK(msg.find("dim") != std::string::npos);
  }
}

TEST_CASE("config defaults") {
  const auto c = pipeline_config_from_json(json{{"workdir", "/tmp/x"}});
  CHECK(c.k == 10);
  CHECK(c.dim == 768);
  CHECK(c.ratios[0] == doctest::Approx(0.70));
  CHECK(c.corpus_path == std::filesystem::path("/tmp/x/corpus.jsonl"));
}

TEST_CASE("run_all produces a deterministic report and skips fresh stages") {
  const auto dir_a = fresh_dir("vset_runall_a");
  const auto config_a = pipeline_config_from_json(tiny_config(dir_a));
  const json summary_a = run_all(config_a);
  CHECK(summary_a.at("stages_run").size() == 9);

  // All artifacts exist.
  for (const auto& p :
       {config_a.corpus_path, config_a.titles_path, config_a.displays_path,
        config_a.index_path, config_a.pools_path, config_a.manifest_path,
        config_a.features_path, config_a.model_path, config_a.report_path}) {
    CHECK(std::filesystem::exists(p));
  }

  // Second invocation in the same workdir: everything is fresh.
  const json summary_again = run_all(config_a);
  CHECK(summary_again.at("stages_run").empty());

  // Fresh workdir, identical config: byte-identical report.
  const auto dir_b = fresh_dir("vset_runall_b");
  const auto config_b = pipeline_config_from_json(tiny_config(dir_b));
  (void)run_all(config_b);
  CHECK(read_text_file(config_a.report_path) ==
        read_text_file(config_b.report_path));

  // Deleting the model re-runs train and eval only.
  std::filesystem::remove(config_a.model_path);
  const json summary_retrain = run_all(config_a);
  const auto reran =
      summary_retrain.at("stages_run").get<std::vector<std::string>>();
  REQUIRE(reran.size() == 2);
  CHECK(reran[0] == "train");
  CHECK(reran[1] == "eval");

  // The report carries the headline metrics.
  const json report = summary_a.at("report");
  CHECK(report.at("pair_level").contains("auroc"));
  CHECK(report.at("value_set_level").contains("classifier"));
  CHECK(report.at("value_set_level").contains("retrieval_only"));
  CHECK(report.contains("strata"));

  // Changing a config knob invalidates the affected stage.
  auto cfg2 = tiny_config(dir_a);
  cfg2["k"] = 4;
  const json summary_k = run_all(pipeline_config_from_json(cfg2));
  const auto rerun_k =
      summary_k.at("stages_run").get<std::vector<std::string>>();
  CHECK(std::find(rerun_k.begin(), rerun_k.end(), "pool") != rerun_k.end());
}

TEST_CASE("cli stage-by-stage pipeline matches the spec surface") {
  const auto dir = fresh_dir("vset_cli_stages");
  const auto synth_cfg = dir / "synth.json";
  write_file_atomic(synth_cfg, json{{"topic_count", 4},
                                    {"sets_per_topic", 15},
                                    {"seed", 2},
                                    {"size_log_mean", 1.6},
                                    {"size_log_sigma", 0.4},
                                    {"catalog_size", 30}}
                                   .dump());

  const std::string d = dir.string();
  CHECK(run_cli("gen-synth --config " + synth_cfg.string() + " --out " + d +
                "/corpus.jsonl") == 0);
  CHECK(run_cli("stats --corpus " + d + "/corpus.jsonl --out " + d +
                "/stats.json") == 0);
  CHECK(run_cli("embed --corpus " + d +
                "/corpus.jsonl --provider hash --field titles --dim 32 "
                "--out " +
                d + "/titles.tbl") == 0);
  CHECK(run_cli("embed --corpus " + d +
                "/corpus.jsonl --provider hash --field displays --dim 32 "
                "--out " +
                d + "/displays.tbl") == 0);
  CHECK(run_cli("index --embs " + d + "/titles.tbl --corpus " + d +
                "/corpus.jsonl --out " + d + "/index.bin") == 0);
  CHECK(run_cli("pool --corpus " + d + "/corpus.jsonl --index " + d +
                "/index.bin --embs " + d + "/titles.tbl --k 5 --out " + d +
                "/pools.jsonl") == 0);
  CHECK(run_cli("split --corpus " + d + "/corpus.jsonl --pools " + d +
                "/pools.jsonl --holdout Publisher-01 --seed 13 --out " + d +
                "/manifest.csv") == 0);
  CHECK(run_cli("features --pools " + d + "/pools.jsonl --title-embs " + d +
                "/titles.tbl --display-embs " + d + "/displays.tbl --out " +
                d + "/feats.bin") == 0);

  const auto train_cfg = dir / "train.json";
  write_file_atomic(train_cfg, json{{"batch_size", 32},
                                    {"max_epochs", 2},
                                    {"seed", 4}}
                                   .dump());
  CHECK(run_cli("train --features " + d + "/feats.bin --manifest " + d +
                "/manifest.csv --config " + train_cfg.string() + " --out " +
                d + "/model.bin") == 0);
  CHECK(run_cli("eval --model " + d + "/model.bin --features " + d +
                "/feats.bin --pools " + d + "/pools.jsonl --manifest " + d +
                "/manifest.csv --out " + d + "/report.json") == 0);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "stats.types.csv"));

  // Theory CLI.
  const auto theory_cfg = dir / "theory.json";
  write_file_atomic(theory_cfg, json{{"N", 1000},
                                     {"K", 50},
                                     {"s", 5},
                                     {"gamma", 0.3},
                                     {"sigma", 1.0},
                                     {"n", 150},
                                     {"trials", 500},
                                     {"seed", 9}}
                                    .dump());
  CHECK(run_cli("simulate-theory --config " + theory_cfg.string() +
                " --sweep 100,200 --out " + d + "/theory.csv") == 0);
  const auto lines = read_lines(dir / "theory.csv");
  CHECK(lines.size() == 3);

  // inspect prints artifact headers.
  CHECK(run_cli("inspect " + d + "/model.bin > " + d + "/inspect.txt") == 0);
}

TEST_CASE("cli exit codes: usage, data error") {
  CHECK(run_cli("") == 1);                       // missing subcommand
  CHECK(run_cli("stats --corpus /nonexistent/corpus.jsonl --out /tmp/x.json") ==
        2);  // IoError -> data error

  // Malformed corpus line surfaces as a data error naming the line.
  const auto dir = fresh_dir("vset_cli_err");
  write_file_atomic(dir / "bad.jsonl", "{not json}\n");
  CHECK(run_cli("stats --corpus " + (dir / "bad.jsonl").string() + " --out " +
                (dir / "stats.json").string()) == 2);
}

TEST_CASE("eval-predictions CLI on constructed predictions") {
  const auto dir = fresh_dir("vset_cli_preds");
  const auto d = dir.string();
  // Small pipeline to get a corpus and manifest.
  auto cfg = tiny_config(dir);
  const auto config = pipeline_config_from_json(cfg);
  stage_gen_synth(config.synth, config.corpus_path);
  stage_embed(config.corpus_path, EmbedField::kTitles, "hash", 32,
              std::nullopt, config.titles_path);
  stage_index(config.corpus_path, config.titles_path, config.index_path);
  stage_pool(config.corpus_path, config.index_path, config.titles_path, 5,
             config.pools_path);
  stage_split(config.corpus_path, config.pools_path,
              config.holdout_publishers, config.ratios, config.split_seed,
              config.manifest_path);

  // Predict every test set's true codes exactly: macro F1 should be 1.
  const auto sets = read_corpus_jsonl(config.corpus_path);
  const auto manifest = read_manifest_csv(config.manifest_path);
  std::string preds;
  for (const auto& row : manifest) {
    if (row.split != Split::kTest) continue;
    for (const auto& vs : sets) {
      if (vs.oid != row.oid) continue;
      json arr = json::array();
      for (const auto& c : vs.codes) {
        arr.push_back({{"code", c.code}, {"system", c.system}});
      }
      preds += json{{"oid", vs.oid}, {"predictions", arr}}.dump() + "\n";
    }
  }
  write_file_atomic(dir / "preds.jsonl", preds);

  CHECK(run_cli("eval-predictions --predictions " + d +
                "/preds.jsonl --corpus " + config.corpus_path.string() +
                " --manifest " + config.manifest_path.string() + " --out " +
                d + "/pred_report.json") == 0);
  const json report = json::parse(read_text_file(dir / "pred_report.json"));
  CHECK(report.at("hallucination_rate") == 0.0);
  CHECK(report.at("value_set_level").at("generator").at("f1") ==
        doctest::Approx(1.0));
}

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vset/corpus.hpp"
#include "vset/model.hpp"

namespace vset {

struct PipelineConfig {
  std::filesystem::path workdir = "out";

  // Artifact paths; empty entries default under workdir.
  std::filesystem::path corpus_path;
  std::filesystem::path titles_path;
  std::filesystem::path displays_path;
  std::filesystem::path index_path;
  std::filesystem::path pools_path;
  std::filesystem::path manifest_path;
  std::filesystem::path features_path;
  std::filesystem::path model_path;
  std::filesystem::path report_path;

  std::string source = "synth";  // "synth" | "fhir"
  std::filesystem::path fhir_dir;
  SynthConfig synth;

  int k = 10;
  Eigen::Index dim = 768;
  std::uint64_t split_seed = 13;
  std::array<double, 3> ratios = {0.70, 0.15, 0.15};
  std::vector<std::string> holdout_publishers;
  std::size_t publisher_bin_threshold = 50;
  TrainConfig train;
};

/// Schema-checks and applies defaults; reports every problem at once in
/// one ConfigError.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
PipelineConfig validate_config(const std::filesystem::path& path);
nlohmann::json pipeline_config_to_json(const PipelineConfig& c);

// Individual stages, shared by the CLI subcommands and run_all.
void stage_ingest(const std::filesystem::path& fhir_dir,
                  const std::filesystem::path& out_corpus);
void stage_gen_synth(const SynthConfig& config,
                     const std::filesystem::path& out_corpus);
void stage_stats(const std::filesystem::path& corpus,
                 const std::filesystem::path& out_json);

enum class EmbedField { kTitles, kDisplays, kBoth };

/// provider "hash" embeds with the deterministic hashing encoder;
/// provider "file" selects the needed strings out of `table_path`.
void stage_embed(const std::filesystem::path& corpus, EmbedField field,
                 const std::string& provider, Eigen::Index dim,
                 const std::optional<std::filesystem::path>& table_path,
                 const std::filesystem::path& out_table);

void stage_index(const std::filesystem::path& corpus,
                 const std::filesystem::path& titles_table,
                 const std::filesystem::path& out_index);
void stage_pool(const std::filesystem::path& corpus,
                const std::filesystem::path& index_path,
                const std::filesystem::path& titles_table, int k,
                const std::filesystem::path& out_pools);
void stage_split(const std::filesystem::path& corpus,
                 const std::filesystem::path& pools,
                 const std::vector<std::string>& holdout_publishers,
                 const std::array<double, 3>& ratios, std::uint64_t seed,
                 const std::filesystem::path& out_manifest);
void stage_features(const std::filesystem::path& pools,
                    const std::filesystem::path& titles_table,
                    const std::filesystem::path& displays_table,
                    const std::filesystem::path& out_features);
void stage_train(const std::filesystem::path& features,
                 const std::filesystem::path& manifest,
                 const TrainConfig& config,
                 const std::filesystem::path& out_model);
nlohmann::json stage_eval(const std::filesystem::path& model,
                          const std::filesystem::path& features,
                          const std::filesystem::path& pools,
                          const std::filesystem::path& manifest,
                          std::size_t publisher_bin_threshold,
                          const std::filesystem::path& out_report);
nlohmann::json stage_eval_predictions(
    const std::filesystem::path& predictions,
    const std::filesystem::path& corpus,
    const std::filesystem::path& manifest,
    std::size_t publisher_bin_threshold,
    const std::filesystem::path& out_report);

/// Executes the full pipeline in order, re-running only stages whose
/// inputs changed (content hashes) or whose outputs are missing; any
/// stage that runs forces everything downstream of it. Returns the final
/// summary (stage list plus the evaluation report).
nlohmann::json run_all(const PipelineConfig& config, bool force = false);

}  // namespace vset

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vset/corpus.hpp"
#include "vset/pool.hpp"
#include "vset/split.hpp"

namespace vset {

/// Rank-based AUROC (Mann-Whitney with average ranks for ties): the
/// fraction of (positive, negative) pairs ranked correctly, ties half.
double auroc(std::span<const double> scores, std::span<const int> labels);

/// Step (non-interpolated) average precision; ties broken by original
/// index when sorting.
double average_precision(std::span<const double> scores,
                         std::span<const int> labels);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Empty-prediction convention: precision 0 when nothing is predicted
/// and truth is non-empty; F1 is 0 when both P and R are 0.
Prf value_set_prf(std::size_t tp, std::size_t fp, std::size_t fn);

/// P/R/F1 of thresholded decisions over a candidate pool; false negatives
/// include target codes the pool never contained.
Prf pool_decision_prf(const CandidatePool& pool,
                      std::span<const char> decisions);

/// P/R/F1 of an explicit (code, system) prediction list against a truth
/// set, by exact pair matching.
Prf prediction_prf(
    const std::vector<std::pair<std::string, std::string>>& predicted,
    const ValueSet& truth);

struct MacroBlock {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double se_f1 = 0.0;  // sample SD (n-1) / sqrt(n); 0 when n == 1
  std::size_t n = 0;
};

MacroBlock macro_aggregate(const std::vector<Prf>& per_set);

/// The baseline that predicts inclusion for every candidate. Its macro
/// recall equals mean RR@K and its pair precision the pool positive rate.
std::vector<Prf> retrieval_only_baseline(const std::vector<CandidatePool>& pools);

struct PredictionSet {
  std::string oid;
  std::vector<std::pair<std::string, std::string>> predicted;
};

/// Line-delimited {"oid":...,"predictions":[{"code","system"},...]};
/// system URIs are normalized and pairs deduplicated on load.
std::vector<PredictionSet> read_predictions_jsonl(
    const std::filesystem::path& path);

struct ExternalScore {
  std::vector<std::pair<std::string, Prf>> per_set;
  std::size_t total_predicted = 0;
  std::size_t hallucinated = 0;  // pairs absent from the corpus universe
  double hallucination_rate = 0.0;
};

/// Scores externally produced prediction sets against the truth corpus.
/// Every oid in `evaluated_oids` contributes a row; sets without a
/// prediction score (0,0,0), unknown prediction oids warn and score
/// (0,0,0). The universe is the union of (code, system) pairs over the
/// whole corpus.
ExternalScore score_external_predictions(
    const std::vector<PredictionSet>& predictions,
    const std::unordered_map<std::string, const ValueSet*>& truth_by_oid,
    const std::unordered_set<std::string>& universe_keys,
    const std::vector<std::string>& evaluated_oids);

std::string universe_key(const std::string& code, const std::string& system);
std::unordered_set<std::string> build_universe(
    const std::vector<ValueSet>& corpus);

struct StratifiedReport {
  std::map<std::string, MacroBlock> by_type;
  std::map<std::string, MacroBlock> by_size;       // true-size bins
  std::map<std::string, MacroBlock> by_publisher;  // publisher_bin
  MacroBlock rr1;  // subset with RR@K == 1.0 (precision is the headline)
};

/// Size bins: 1-5, 6-15, 16-50, 51-150, >150.
std::string size_bin(std::size_t true_size);

StratifiedReport stratified_report(
    const std::vector<std::pair<std::string, Prf>>& per_set,
    const SplitManifest& manifest,
    const std::unordered_map<std::string, std::size_t>& truth_sizes,
    std::size_t publisher_bin_threshold = 50);

nlohmann::json macro_block_to_json(const MacroBlock& block);
nlohmann::json stratified_report_to_json(const StratifiedReport& report);
void write_strata_csv(const std::filesystem::path& json_report_path,
                      const StratifiedReport& report);

}  // namespace vset

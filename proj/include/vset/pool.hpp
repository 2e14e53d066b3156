// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vset/corpus.hpp"

namespace vset {

struct CandidateEntry {
  std::string code;
  std::string system;
  std::string display;
  double similarity = 0.0;  // max over source sets containing this code
  std::string source_oid;   // the max-similarity source
  int label = 0;            // 1 iff (code, system) is in the target's codes
};

struct CandidatePool {
  std::string target_oid;
  std::string target_title;     // carried so feature assembly is replayable
  std::size_t target_size = 0;  // |codes(target)|, kept for recall
  double rr_at_k = 0.0;         // |target codes in pool| / |target codes|
  std::vector<CandidateEntry> entries;
};

/// Union of the retrieved sets' codes with duplicate (code, system) pairs
/// collapsed to the highest-scoring entry; similarity ties keep the
/// earlier-retrieved source's display. `retrieved` must be in retrieval
/// rank order and must not contain the target itself.
CandidatePool build_candidate_pool(
    const ValueSet& target,
    const std::vector<std::pair<const ValueSet*, double>>& retrieved);

/// Total positives / total entries across pools.
double pool_positive_rate(const std::vector<CandidatePool>& pools);

void write_pools_jsonl(const std::filesystem::path& path,
                       const std::vector<CandidatePool>& pools);
std::vector<CandidatePool> read_pools_jsonl(const std::filesystem::path& path);

}  // namespace vset

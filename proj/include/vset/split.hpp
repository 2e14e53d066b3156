// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vset/corpus.hpp"

namespace vset {

enum class Split { kTrain, kVal, kTest };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct SplitRow {
  std::string oid;
  Split split = Split::kTrain;
  double rr_at_k = 0.0;
  VsType vs_type = VsType::kOther;
  std::string publisher;
};

using SplitManifest = std::vector<SplitRow>;

/// Publishers with at least `threshold` sets keep their own stratum bin;
/// the long tail collapses into "OTHER".
std::string publisher_bin(const std::string& publisher,
                          const std::map<std::string, std::size_t>& counts,
                          std::size_t threshold = 50);

/// Held-out publishers go entirely to test. The rest are stratified on
/// (vs_type, publisher_bin) and partitioned by largest remainder with tie
/// order train > val > test; strata smaller than 3 fall back to train.
/// Deterministic given the seed. `rr_by_oid` fills the manifest column.
SplitManifest assign_splits(const std::vector<ValueSet>& sets,
                            const std::vector<std::string>& held_out_publishers,
                            std::array<double, 3> ratios, std::uint64_t seed,
                            const std::map<std::string, double>& rr_by_oid);

// CSV manifest: header `oid,split,rr_at_k,vs_type,publisher`.
void write_manifest_csv(const std::filesystem::path& path,
                        const SplitManifest& manifest);
SplitManifest read_manifest_csv(const std::filesystem::path& path);

}  // namespace vset

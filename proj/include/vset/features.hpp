// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vset/embed.hpp"
#include "vset/index.hpp"
#include "vset/pool.hpp"

namespace vset {

/// Fixed one-hot slot order; anything unlisted maps to OTHER.
inline constexpr std::array<std::string_view, 8> kSystemSlots = {
    "SNOMED-CT", "ICD-10-CM", "RxNorm",     "LOINC",
    "CPT",       "ICD-10-PCS", "HCPCS",     "OTHER"};

Eigen::Matrix<double, 8, 1> one_hot_system(std::string_view system);

/// Row-aligned provenance for one feature row.
struct FeatureRowRef {
  std::string oid;
  std::string code;
  std::string system;
};

/// Dense per-pair feature set. Row layout:
///   [ title embedding (d) | display embedding (d) | one-hot system (8) |
///     retrieval similarity (1) ]
/// giving 2d+9 columns (1545 at d=768).
struct FeatureMatrix {
  Eigen::Index embedding_dim = 0;
  RowMatrixXd x;
  Eigen::VectorXd y;               // labels in {0,1}
  std::vector<FeatureRowRef> rows;  // parallel to x

  Eigen::Index cols() const { return 2 * embedding_dim + 9; }
  Eigen::Index size() const { return x.rows(); }
};

/// Features for a single pool, in entry order. The title block is shared
/// by every row of the pool.
FeatureMatrix assemble_pool_features(const CandidatePool& pool,
                                     const std::string& target_title,
                                     const EmbeddingTable& titles,
                                     const EmbeddingTable& displays);

/// Features for a whole pools file; row order follows the pools order.
FeatureMatrix assemble_features(const std::vector<CandidatePool>& pools,
                                const EmbeddingTable& titles,
                                const EmbeddingTable& displays);

void save_features(const std::filesystem::path& path,
                   const FeatureMatrix& features);
FeatureMatrix load_features(const std::filesystem::path& path);

}  // namespace vset

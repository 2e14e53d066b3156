// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vset/embed.hpp"

namespace vset {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Exact flat inner-product index. Rows are unit-norm, so scores equal
/// cosine similarity. Immutable after build; concurrent reads are safe.
struct VectorIndex {
  Eigen::Index dim = 0;
  std::vector<std::string> ids;  // insertion order = corpus order
  RowMatrixXd vectors;           // one row per id
};

/// `entries` carries (oid, title) in corpus order; every title must be
/// present in the table.
VectorIndex build_index(
    const EmbeddingTable& titles,
    const std::vector<std::pair<std::string, std::string>>& entries);

struct SearchHit {
  std::string oid;
  double similarity;
};

/// Exact top-k by inner product, descending; ties broken by insertion
/// order. `exclude` (usually the query's own oid) is never returned.
std::vector<SearchHit> query_top_k(const VectorIndex& index,
                                   const Eigen::Ref<const Eigen::VectorXd>& query,
                                   int k,
                                   const std::string* exclude = nullptr);

void save_index(const std::filesystem::path& path, const VectorIndex& index);
VectorIndex load_index(const std::filesystem::path& path);

}  // namespace vset

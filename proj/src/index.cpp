// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/index.hpp"

#include <algorithm>
#include <numeric>

#include "vset/error.hpp"
#include "vset/persistence.hpp"

namespace vset {

VectorIndex build_index(
    const EmbeddingTable& titles,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  VectorIndex index;
  index.dim = titles.dim();
  index.ids.reserve(entries.size());
  index.vectors.resize(static_cast<Eigen::Index>(entries.size()), index.dim);
  Eigen::Index row = 0;
  for (const auto& [oid, title] : entries) {
    if (!titles.contains(title)) {
      throw Error(Errc::kMissingTitleEmbedding,
                  "oid " + oid + " title '" + title + "'");
    }
    index.vectors.row(row++) = titles.at(title).transpose();
    index.ids.push_back(oid);
  }
  return index;
}

std::vector<SearchHit> query_top_k(
    const VectorIndex& index, const Eigen::Ref<const Eigen::VectorXd>& query,
    int k, const std::string* exclude) {
  if (query.size() != index.dim) {
    throw Error(Errc::kDimensionMismatch,
                "query dim " + std::to_string(query.size()) + ", index dim " +
                    std::to_string(index.dim));
  }
  if (k < 1) {
    throw Error(Errc::kInvalidConfig, "k must be >= 1");
  }

  // Per-row dot products: bitwise identical to a naive full scan, so the
  // brute-force oracle can compare exactly.
  Eigen::VectorXd scores(index.vectors.rows());
  for (Eigen::Index i = 0; i < index.vectors.rows(); ++i) {
    scores[i] = index.vectors.row(i) * query;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  if (exclude != nullptr) {
    std::erase_if(order, [&](Eigen::Index i) {
      return index.ids[static_cast<std::size_t>(i)] == *exclude;
    });
  }
  const std::size_t keep =
      std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](Eigen::Index a, Eigen::Index b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });

  std::vector<SearchHit> hits;
  hits.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const Eigen::Index row = order[i];
    hits.push_back({index.ids[static_cast<std::size_t>(row)], scores[row]});
  }
  return hits;
}

void save_index(const std::filesystem::path& path, const VectorIndex& index) {
  nlohmann::json meta{{"dim", index.dim},
                      {"count", index.ids.size()},
                      {"ids", index.ids}};
  write_artifact(path, "index", meta,
                 doubles_to_bytes({index.vectors.data(),
                                   static_cast<std::size_t>(
                                       index.vectors.size())}));
}

VectorIndex load_index(const std::filesystem::path& path) {
  Artifact art = read_artifact(path, "index");
  VectorIndex index;
  index.dim = art.metadata.at("dim").get<Eigen::Index>();
  index.ids = art.metadata.at("ids").get<std::vector<std::string>>();
  index.vectors.resize(static_cast<Eigen::Index>(index.ids.size()), index.dim);
  bytes_to_doubles(art.payload,
                   {index.vectors.data(),
                    static_cast<std::size_t>(index.vectors.size())});
  return index;
}

}  // namespace vset

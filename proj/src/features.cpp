// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/features.hpp"

#include "vset/error.hpp"
#include "vset/persistence.hpp"

namespace vset {

Eigen::Matrix<double, 8, 1> one_hot_system(std::string_view system) {
  Eigen::Matrix<double, 8, 1> v = Eigen::Matrix<double, 8, 1>::Zero();
  for (std::size_t i = 0; i + 1 < kSystemSlots.size(); ++i) {
    if (system == kSystemSlots[i]) {
      v[static_cast<Eigen::Index>(i)] = 1.0;
      return v;
    }
  }
  v[7] = 1.0;  // OTHER
  return v;
}

namespace {

void fill_pool_rows(const CandidatePool& pool, const std::string& target_title,
                    const EmbeddingTable& titles,
                    const EmbeddingTable& displays, FeatureMatrix& out,
                    Eigen::Index row0) {
  const Eigen::Index d = out.embedding_dim;
  const auto title_vec = titles.at(target_title);
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    const auto& e = pool.entries[i];
    const Eigen::Index r = row0 + static_cast<Eigen::Index>(i);
    out.x.row(r).segment(0, d) = title_vec.transpose();
    out.x.row(r).segment(d, d) =
        displays.at(display_key(e.display)).transpose();
    out.x.row(r).segment(2 * d, 8) = one_hot_system(e.system).transpose();
    out.x(r, 2 * d + 8) = e.similarity;
    out.y[r] = static_cast<double>(e.label);
    out.rows[static_cast<std::size_t>(r)] = {pool.target_oid, e.code,
                                             e.system};
  }
}

}  // namespace

FeatureMatrix assemble_pool_features(const CandidatePool& pool,
                                     const std::string& target_title,
                                     const EmbeddingTable& titles,
                                     const EmbeddingTable& displays) {
  if (titles.dim() != displays.dim()) {
    throw Error(Errc::kDimensionMismatch,
                "title and display tables disagree on dim");
  }
  FeatureMatrix out;
  out.embedding_dim = titles.dim();
  const auto n = static_cast<Eigen::Index>(pool.entries.size());
  out.x.resize(n, out.cols());
  out.y.resize(n);
  out.rows.resize(static_cast<std::size_t>(n));
  fill_pool_rows(pool, target_title, titles, displays, out, 0);
  return out;
}

FeatureMatrix assemble_features(const std::vector<CandidatePool>& pools,
                                const EmbeddingTable& titles,
                                const EmbeddingTable& displays) {
  if (titles.dim() != displays.dim()) {
    throw Error(Errc::kDimensionMismatch,
                "title and display tables disagree on dim");
  }
  FeatureMatrix out;
  out.embedding_dim = titles.dim();

  std::size_t total = 0;
  for (const auto& p : pools) total += p.entries.size();
  out.x.resize(static_cast<Eigen::Index>(total), out.cols());
  out.y.resize(static_cast<Eigen::Index>(total));
  out.rows.resize(total);

  Eigen::Index row = 0;
  for (const auto& p : pools) {
    fill_pool_rows(p, p.target_title, titles, displays, out, row);
    row += static_cast<Eigen::Index>(p.entries.size());
  }
  return out;
}

void save_features(const std::filesystem::path& path,
                   const FeatureMatrix& features) {
  // Payload: row-major feature matrix, then the label vector, then the
  // row map as JSONL text. Offsets live in the metadata.
  std::string payload = doubles_to_bytes(
      {features.x.data(), static_cast<std::size_t>(features.x.size())});
  payload += doubles_to_bytes(
      {features.y.data(), static_cast<std::size_t>(features.y.size())});
  std::string rowmap;
  for (const auto& r : features.rows) {
    rowmap += nlohmann::json{{"oid", r.oid},
                             {"code", r.code},
                             {"system", r.system}}
                  .dump();
    rowmap += '\n';
  }
  const std::size_t matrix_bytes =
      static_cast<std::size_t>(features.x.size()) * sizeof(double);
  const std::size_t label_bytes =
      static_cast<std::size_t>(features.y.size()) * sizeof(double);
  payload += rowmap;

  nlohmann::json meta{{"rows", features.x.rows()},
                      {"cols", features.x.cols()},
                      {"embedding_dim", features.embedding_dim},
                      {"matrix_bytes", matrix_bytes},
                      {"label_bytes", label_bytes},
                      {"rowmap_bytes", rowmap.size()}};
  write_artifact(path, "features", meta, payload);
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  Artifact art = read_artifact(path, "features");
  FeatureMatrix out;
  const auto rows = art.metadata.at("rows").get<Eigen::Index>();
  const auto cols = art.metadata.at("cols").get<Eigen::Index>();
  out.embedding_dim = art.metadata.at("embedding_dim").get<Eigen::Index>();
  const auto matrix_bytes = art.metadata.at("matrix_bytes").get<std::size_t>();
  const auto label_bytes = art.metadata.at("label_bytes").get<std::size_t>();
  const auto rowmap_bytes = art.metadata.at("rowmap_bytes").get<std::size_t>();
  if (matrix_bytes + label_bytes + rowmap_bytes != art.payload.size()) {
    throw Error(Errc::kIntegrityError,
                path.string() + ": section sizes disagree with payload");
  }

  std::string_view payload(art.payload);
  out.x.resize(rows, cols);
  bytes_to_doubles(payload.substr(0, matrix_bytes),
                   {out.x.data(), static_cast<std::size_t>(out.x.size())});
  out.y.resize(rows);
  bytes_to_doubles(payload.substr(matrix_bytes, label_bytes),
                   {out.y.data(), static_cast<std::size_t>(out.y.size())});

  out.rows.reserve(static_cast<std::size_t>(rows));
  std::string_view rowmap = payload.substr(matrix_bytes + label_bytes);
  std::size_t start = 0;
  while (start < rowmap.size()) {
    std::size_t nl = rowmap.find('\n', start);
    if (nl == std::string_view::npos) nl = rowmap.size();
    auto j = nlohmann::json::parse(rowmap.substr(start, nl - start), nullptr,
                                   false);
    if (j.is_discarded()) {
      throw Error(Errc::kIntegrityError, path.string() + ": bad row map");
    }
    out.rows.push_back({j.at("oid").get<std::string>(),
                        j.at("code").get<std::string>(),
                        j.at("system").get<std::string>()});
    start = nl + 1;
  }
  if (out.rows.size() != static_cast<std::size_t>(rows)) {
    throw Error(Errc::kIntegrityError,
                path.string() + ": row map length mismatch");
  }
  return out;
}

}  // namespace vset

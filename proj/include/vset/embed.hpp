// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vset {

/// Immutable string -> unit-norm vector table. Vectors are stored as the
/// columns of one dense matrix; safe for shared concurrent reads.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }

  bool contains(const std::string& key) const {
    return pos_.find(key) != pos_.end();
  }

  /// Throws MissingEmbedding: an absent key signals a pipeline bug, never
  /// a silent zero vector.
  Eigen::Ref<const Eigen::VectorXd> at(const std::string& key) const;

  /// Throws DuplicateKey and DimensionMismatch.
  void insert(const std::string& key, const Eigen::VectorXd& vec);

 private:
  Eigen::Index dim_ = 0;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, Eigen::Index> pos_;
  Eigen::MatrixXd vectors_;  // dim x n, one column per key
  Eigen::Index count_ = 0;
};

/// Deterministic stand-in encoder: signed feature hashing over lowercase
/// word unigrams and character trigrams, L2-normalized. A text with no
/// features maps to the first basis vector.
Eigen::VectorXd hash_embed(std::string_view text, Eigen::Index dim);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::VectorXd embed(const std::string& text) const = 0;
};

class HashEmbedder final : public EmbeddingProvider {
 public:
  explicit HashEmbedder(Eigen::Index dim) : dim_(dim) {}
  Eigen::Index dim() const override { return dim_; }
  Eigen::VectorXd embed(const std::string& text) const override {
    return hash_embed(text, dim_);
  }

 private:
  Eigen::Index dim_;
};

/// Embeds each unique string exactly once, in first-occurrence order.
EmbeddingTable embed_unique_strings(const std::vector<std::string>& strings,
                                    const EmbeddingProvider& provider);

// Table file format: header line "dim=<d>", then one record per line:
// base64(key) TAB space-separated decimal floats.
EmbeddingTable load_embedding_table(const std::filesystem::path& path);
void save_embedding_table(const std::filesystem::path& path,
                          const EmbeddingTable& table);

/// Empty display names are embedded under this sentinel key.
inline constexpr std::string_view kEmptyDisplaySentinel = "<EMPTY>";

inline std::string display_key(const std::string& display) {
  return display.empty() ? std::string(kEmptyDisplaySentinel) : display;
}

}  // namespace vset

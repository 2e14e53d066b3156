// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/embed.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "vset/error.hpp"
#include "vset/io_util.hpp"
#include "vset/log.hpp"

namespace vset {

Eigen::Ref<const Eigen::VectorXd> EmbeddingTable::at(
    const std::string& key) const {
  auto it = pos_.find(key);
  if (it == pos_.end()) {
    throw Error(Errc::kMissingEmbedding, "'" + key + "'");
  }
  return vectors_.col(it->second);
}

void EmbeddingTable::insert(const std::string& key,
                            const Eigen::VectorXd& vec) {
  if (dim_ == 0) {
    dim_ = vec.size();
  }
  if (vec.size() != dim_) {
    throw Error(Errc::kDimensionMismatch,
                "vector for '" + key + "' has dim " +
                    std::to_string(vec.size()) + ", table dim " +
                    std::to_string(dim_));
  }
  if (!pos_.emplace(key, count_).second) {
    throw Error(Errc::kDuplicateKey, "'" + key + "'");
  }
  if (count_ == vectors_.cols()) {
    Eigen::Index grown = std::max<Eigen::Index>(16, vectors_.cols() * 2);
    vectors_.conservativeResize(dim_, grown);
  }
  vectors_.col(count_) = vec;
  keys_.push_back(key);
  ++count_;
}

Eigen::VectorXd hash_embed(std::string_view text, Eigen::Index dim) {
  if (dim < 8) {
    throw Error(Errc::kInvalidConfig, "hash_embed requires dim >= 8");
  }
  std::string lower;
  lower.reserve(text.size());
  for (char c : text) {
    lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
  auto add_feature = [&](std::string_view prefix, std::string_view feature) {
    std::string f;
    f.reserve(prefix.size() + feature.size());
    f += prefix;
    f += feature;
    const std::uint64_t h = fnv1a64(f);
    const auto idx = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim));
    acc[idx] += (h >> 63) ? 1.0 : -1.0;
  };

  // Word unigrams.
  std::size_t i = 0;
  while (i < lower.size()) {
    while (i < lower.size() &&
           !std::isalnum(static_cast<unsigned char>(lower[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < lower.size() &&
           std::isalnum(static_cast<unsigned char>(lower[j]))) {
      ++j;
    }
    if (j > i) {
      add_feature("w:", std::string_view(lower).substr(i, j - i));
    }
    i = j;
  }
  // Character trigrams over the raw lowercased text.
  if (lower.size() >= 3) {
    for (std::size_t k = 0; k + 3 <= lower.size(); ++k) {
      add_feature("t:", std::string_view(lower).substr(k, 3));
    }
  }

  const double norm = acc.norm();
  if (norm == 0.0) {
    acc[0] = 1.0;
    return acc;
  }
  return acc / norm;
}

EmbeddingTable embed_unique_strings(const std::vector<std::string>& strings,
                                    const EmbeddingProvider& provider) {
  EmbeddingTable table(provider.dim());
  for (const auto& s : strings) {
    if (table.contains(s)) continue;
    table.insert(s, provider.embed(s));
  }
  return table;
}

EmbeddingTable load_embedding_table(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0].rfind("dim=", 0) != 0) {
    throw Error(Errc::kBadHeader, path.string() + ": expected 'dim=<d>'");
  }
  Eigen::Index dim = 0;
  {
    const std::string_view v = std::string_view(lines[0]).substr(4);
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), dim);
    if (ec != std::errc() || ptr != v.data() + v.size() || dim < 1) {
      throw Error(Errc::kBadHeader, path.string() + ": bad dim value");
    }
  }

  EmbeddingTable table(dim);
  Eigen::VectorXd vec(dim);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(Errc::kBadRecord,
                  path.string() + " line " + std::to_string(ln + 1) +
                      ": no TAB separator");
    }
    const std::string key = base64_decode(std::string_view(line).substr(0, tab));

    Eigen::Index n = 0;
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p >= end) break;
      double value = 0.0;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc()) {
        throw Error(Errc::kBadRecord,
                    path.string() + " line " + std::to_string(ln + 1) +
                        ": bad float");
      }
      if (n >= dim) {
        ++n;  // overflow; reported below
        p = next;
        continue;
      }
      vec[n++] = value;
      p = next;
    }
    if (n != dim) {
      throw Error(Errc::kDimensionMismatch,
                  path.string() + " line " + std::to_string(ln + 1) + ": " +
                      std::to_string(n) + " values, expected " +
                      std::to_string(dim));
    }

    const double norm = vec.norm();
    if (!std::isfinite(norm) || norm == 0.0) {
      throw Error(Errc::kBadRecord,
                  path.string() + " line " + std::to_string(ln + 1) +
                      ": degenerate vector");
    }
    if (std::abs(norm - 1.0) > 1e-6) {
      log::warn("re-normalizing '" + key + "' (norm " + format_double(norm) +
                ")");
      table.insert(key, vec / norm);
    } else {
      table.insert(key, vec);
    }
  }
  return table;
}

void save_embedding_table(const std::filesystem::path& path,
                          const EmbeddingTable& table) {
  std::string out = "dim=" + std::to_string(table.dim()) + "\n";
  for (const auto& key : table.keys()) {
    out += base64_encode(key);
    out += '\t';
    const auto vec = table.at(key);
    for (Eigen::Index i = 0; i < vec.size(); ++i) {
      if (i > 0) out += ' ';
      out += format_double(vec[i]);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace vset

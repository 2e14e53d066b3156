// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/pool.hpp"

#include <unordered_map>
#include <unordered_set>

#include "vset/error.hpp"
#include "vset/io_util.hpp"

namespace vset {

using nlohmann::json;

namespace {
std::string pair_key(const std::string& code, const std::string& system) {
  return code + '\x1f' + system;
}
}  // namespace

CandidatePool build_candidate_pool(
    const ValueSet& target,
    const std::vector<std::pair<const ValueSet*, double>>& retrieved) {
  if (retrieved.empty()) {
    throw Error(Errc::kEmptyRetrieval, "target " + target.oid);
  }

  std::unordered_set<std::string> target_keys;
  target_keys.reserve(target.codes.size());
  for (const auto& c : target.codes) {
    target_keys.insert(pair_key(c.code, c.system));
  }

  CandidatePool pool;
  pool.target_oid = target.oid;
  pool.target_title = target.title;
  pool.target_size = target.codes.size();

  std::unordered_map<std::string, std::size_t> by_key;
  for (const auto& [source, similarity] : retrieved) {
    for (const auto& c : source->codes) {
      const std::string key = pair_key(c.code, c.system);
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        by_key.emplace(key, pool.entries.size());
        pool.entries.push_back({c.code, c.system, c.display, similarity,
                                source->oid,
                                target_keys.count(key) ? 1 : 0});
      } else if (similarity > pool.entries[it->second].similarity) {
        // Strict >: ties keep the earlier-retrieved source.
        CandidateEntry& e = pool.entries[it->second];
        e.similarity = similarity;
        e.display = c.display;
        e.source_oid = source->oid;
      }
    }
  }

  std::size_t covered = 0;
  for (const auto& e : pool.entries) covered += static_cast<std::size_t>(e.label);
  pool.rr_at_k = target.codes.empty()
                     ? 0.0
                     : static_cast<double>(covered) /
                           static_cast<double>(target.codes.size());
  return pool;
}

double pool_positive_rate(const std::vector<CandidatePool>& pools) {
  if (pools.empty()) {
    throw Error(Errc::kEmptyPools, "pool_positive_rate over empty input");
  }
  std::size_t positives = 0;
  std::size_t total = 0;
  for (const auto& p : pools) {
    total += p.entries.size();
    for (const auto& e : p.entries) positives += static_cast<std::size_t>(e.label);
  }
  return total == 0 ? 0.0
                    : static_cast<double>(positives) /
                          static_cast<double>(total);
}

void write_pools_jsonl(const std::filesystem::path& path,
                       const std::vector<CandidatePool>& pools) {
  std::string out;
  for (const auto& p : pools) {
    json entries = json::array();
    for (const auto& e : p.entries) {
      entries.push_back({{"code", e.code},
                         {"system", e.system},
                         {"display", e.display},
                         {"similarity", e.similarity},
                         {"source_oid", e.source_oid},
                         {"label", e.label}});
    }
    out += json{{"target_oid", p.target_oid},
                {"target_title", p.target_title},
                {"target_size", p.target_size},
                {"rr_at_k", p.rr_at_k},
                {"entries", std::move(entries)}}
               .dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<CandidatePool> read_pools_jsonl(
    const std::filesystem::path& path) {
  std::vector<CandidatePool> pools;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(Errc::kBadRecord, path.string() + " line " +
                                        std::to_string(line_no) +
                                        ": invalid JSON");
    }
    CandidatePool p;
    p.target_oid = j.at("target_oid").get<std::string>();
    p.target_title = j.value("target_title", std::string());
    p.target_size = j.at("target_size").get<std::size_t>();
    p.rr_at_k = j.at("rr_at_k").get<double>();
    for (const auto& e : j.at("entries")) {
      p.entries.push_back({e.at("code").get<std::string>(),
                           e.at("system").get<std::string>(),
                           e.value("display", std::string()),
                           e.at("similarity").get<double>(),
                           e.value("source_oid", std::string()),
                           e.at("label").get<int>()});
    }
    pools.push_back(std::move(p));
  }
  return pools;
}

}  // namespace vset

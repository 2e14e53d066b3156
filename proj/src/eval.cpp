// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vset/error.hpp"
#include "vset/io_util.hpp"
#include "vset/log.hpp"

namespace vset {

using nlohmann::json;

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw Error(Errc::kShapeMismatch, "scores/labels size mismatch");
  }
  std::size_t pos = 0;
  for (int l : labels) pos += static_cast<std::size_t>(l != 0);
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) {
    throw Error(Errc::kDegenerateLabels, "auroc needs both classes");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Average ranks over tied scores, then the Mann-Whitney statistic.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double u = rank_sum_pos -
                   static_cast<double>(pos) * (static_cast<double>(pos) + 1.0) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double average_precision(std::span<const double> scores,
                         std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw Error(Errc::kShapeMismatch, "scores/labels size mismatch");
  }
  std::size_t pos = 0;
  for (int l : labels) pos += static_cast<std::size_t>(l != 0);
  if (pos == 0) {
    throw Error(Errc::kDegenerateLabels,
                "average precision needs at least one positive");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  double ap = 0.0;
  double tp = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]] != 0) {
      tp += 1.0;
      ap += tp / static_cast<double>(k + 1);
    }
  }
  return ap / static_cast<double>(pos);
}

Prf value_set_prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf out;
  const std::size_t predicted = tp + fp;
  const std::size_t truth = tp + fn;
  out.precision = predicted > 0
                      ? static_cast<double>(tp) / static_cast<double>(predicted)
                      : 0.0;
  out.recall =
      truth > 0 ? static_cast<double>(tp) / static_cast<double>(truth) : 0.0;
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall /
                     (out.precision + out.recall)
               : 0.0;
  return out;
}

Prf pool_decision_prf(const CandidatePool& pool,
                      std::span<const char> decisions) {
  if (decisions.size() != pool.entries.size()) {
    throw Error(Errc::kShapeMismatch, "decisions do not match pool entries");
  }
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (!decisions[i]) continue;
    if (pool.entries[i].label) ++tp;
    else ++fp;
  }
  const std::size_t fn = pool.target_size - tp;  // misses outside the pool too
  return value_set_prf(tp, fp, fn);
}

Prf prediction_prf(
    const std::vector<std::pair<std::string, std::string>>& predicted,
    const ValueSet& truth) {
  std::unordered_set<std::string> truth_keys;
  truth_keys.reserve(truth.codes.size());
  for (const auto& c : truth.codes) {
    truth_keys.insert(universe_key(c.code, c.system));
  }
  std::size_t tp = 0;
  for (const auto& [code, system] : predicted) {
    if (truth_keys.count(universe_key(code, system))) ++tp;
  }
  return value_set_prf(tp, predicted.size() - tp, truth.codes.size() - tp);
}

MacroBlock macro_aggregate(const std::vector<Prf>& per_set) {
  if (per_set.empty()) {
    throw Error(Errc::kEmptyInput, "macro_aggregate over empty input");
  }
  MacroBlock out;
  out.n = per_set.size();
  for (const auto& p : per_set) {
    out.precision += p.precision;
    out.recall += p.recall;
    out.f1 += p.f1;
  }
  const double n = static_cast<double>(out.n);
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  if (out.n > 1) {
    double ss = 0.0;
    for (const auto& p : per_set) {
      ss += (p.f1 - out.f1) * (p.f1 - out.f1);
    }
    out.se_f1 = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

std::vector<Prf> retrieval_only_baseline(
    const std::vector<CandidatePool>& pools) {
  std::vector<Prf> out;
  out.reserve(pools.size());
  for (const auto& pool : pools) {
    const std::vector<char> all_positive(pool.entries.size(), 1);
    out.push_back(pool_decision_prf(pool, all_positive));
  }
  return out;
}

std::string universe_key(const std::string& code, const std::string& system) {
  return code + '\x1f' + system;
}

std::unordered_set<std::string> build_universe(
    const std::vector<ValueSet>& corpus) {
  std::unordered_set<std::string> keys;
  for (const auto& vs : corpus) {
    for (const auto& c : vs.codes) {
      keys.insert(universe_key(c.code, c.system));
    }
  }
  return keys;
}

std::vector<PredictionSet> read_predictions_jsonl(
    const std::filesystem::path& path) {
  std::vector<PredictionSet> out;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("oid") ||
        !j.contains("predictions") || !j["predictions"].is_array()) {
      throw Error(Errc::kBadRecord, path.string() + " line " +
                                        std::to_string(line_no) +
                                        ": bad prediction record");
    }
    PredictionSet ps;
    ps.oid = j["oid"].get<std::string>();
    std::unordered_set<std::string> seen;
    for (const auto& p : j["predictions"]) {
      std::string code = p.value("code", std::string());
      std::string system =
          normalize_system_uri(p.value("system", std::string()));
      if (code.empty() || system.empty()) continue;
      if (seen.insert(universe_key(code, system)).second) {
        ps.predicted.emplace_back(std::move(code), std::move(system));
      }
    }
    out.push_back(std::move(ps));
  }
  return out;
}

ExternalScore score_external_predictions(
    const std::vector<PredictionSet>& predictions,
    const std::unordered_map<std::string, const ValueSet*>& truth_by_oid,
    const std::unordered_set<std::string>& universe_keys,
    const std::vector<std::string>& evaluated_oids) {
  ExternalScore out;

  std::unordered_map<std::string, const PredictionSet*> by_oid;
  for (const auto& p : predictions) {
    if (!by_oid.emplace(p.oid, &p).second) {
      log::warn("duplicate prediction entry for oid " + p.oid +
                "; keeping first");
      continue;
    }
    out.total_predicted += p.predicted.size();
    for (const auto& [code, system] : p.predicted) {
      if (!universe_keys.count(universe_key(code, system))) {
        ++out.hallucinated;
      }
    }
  }
  out.hallucination_rate =
      out.total_predicted > 0
          ? static_cast<double>(out.hallucinated) /
                static_cast<double>(out.total_predicted)
          : 0.0;

  std::unordered_set<std::string> evaluated(evaluated_oids.begin(),
                                            evaluated_oids.end());
  for (const auto& oid : evaluated_oids) {
    auto truth = truth_by_oid.find(oid);
    if (truth == truth_by_oid.end()) {
      throw Error(Errc::kUnknownOid, "evaluated oid " + oid +
                                         " not found in corpus");
    }
    auto pred = by_oid.find(oid);
    if (pred == by_oid.end()) {
      out.per_set.emplace_back(oid, Prf{});  // no prediction: (0,0,0)
    } else {
      out.per_set.emplace_back(
          oid, prediction_prf(pred->second->predicted, *truth->second));
    }
  }
  // Unknown oids: warn and score (0,0,0) rather than aborting.
  for (const auto& p : predictions) {
    if (!truth_by_oid.count(p.oid)) {
      log::warn("prediction for unknown oid " + p.oid + "; scored (0,0,0)");
      out.per_set.emplace_back(p.oid, Prf{});
    } else if (!evaluated.count(p.oid)) {
      log::warn("prediction for oid " + p.oid +
                " outside the evaluated split; ignored");
    }
  }
  return out;
}

std::string size_bin(std::size_t true_size) {
  if (true_size <= 5) return "1-5";
  if (true_size <= 15) return "6-15";
  if (true_size <= 50) return "16-50";
  if (true_size <= 150) return "51-150";
  return ">150";
}

StratifiedReport stratified_report(
    const std::vector<std::pair<std::string, Prf>>& per_set,
    const SplitManifest& manifest,
    const std::unordered_map<std::string, std::size_t>& truth_sizes,
    std::size_t publisher_bin_threshold) {
  std::unordered_map<std::string, const SplitRow*> rows;
  std::map<std::string, std::size_t> publisher_counts;
  for (const auto& row : manifest) {
    rows.emplace(row.oid, &row);
    ++publisher_counts[row.publisher];
  }

  std::map<std::string, std::vector<Prf>> by_type, by_size, by_publisher;
  std::vector<Prf> rr1;
  for (const auto& [oid, prf] : per_set) {
    auto it = rows.find(oid);
    if (it == rows.end()) {
      throw Error(Errc::kMissingManifestRow, "oid " + oid);
    }
    auto size_it = truth_sizes.find(oid);
    if (size_it == truth_sizes.end()) {
      throw Error(Errc::kMissingManifestRow, "no truth size for oid " + oid);
    }
    const SplitRow& row = *it->second;
    by_type[to_string(row.vs_type)].push_back(prf);
    by_size[size_bin(size_it->second)].push_back(prf);
    by_publisher[publisher_bin(row.publisher, publisher_counts,
                               publisher_bin_threshold)]
        .push_back(prf);
    if (row.rr_at_k == 1.0) rr1.push_back(prf);
  }

  StratifiedReport report;
  for (const auto& [k, v] : by_type) report.by_type[k] = macro_aggregate(v);
  for (const auto& [k, v] : by_size) report.by_size[k] = macro_aggregate(v);
  for (const auto& [k, v] : by_publisher)
    report.by_publisher[k] = macro_aggregate(v);
  if (!rr1.empty()) report.rr1 = macro_aggregate(rr1);
  return report;
}

json macro_block_to_json(const MacroBlock& block) {
  return json{{"precision", block.precision},
              {"recall", block.recall},
              {"f1", block.f1},
              {"se_f1", block.se_f1},
              {"n", block.n}};
}

json stratified_report_to_json(const StratifiedReport& report) {
  json strata{{"vs_type", json::object()},
              {"size", json::object()},
              {"publisher_bin", json::object()}};
  for (const auto& [k, v] : report.by_type)
    strata["vs_type"][k] = macro_block_to_json(v);
  for (const auto& [k, v] : report.by_size)
    strata["size"][k] = macro_block_to_json(v);
  for (const auto& [k, v] : report.by_publisher)
    strata["publisher_bin"][k] = macro_block_to_json(v);
  return strata;
}

void write_strata_csv(const std::filesystem::path& json_report_path,
                      const StratifiedReport& report) {
  auto sibling = [&](const std::string& name) {
    auto p = json_report_path;
    p.replace_extension();
    p += "." + name + ".csv";
    return p;
  };
  auto dump = [](const std::map<std::string, MacroBlock>& blocks) {
    std::string csv = "stratum,precision,recall,f1,se_f1,n\n";
    for (const auto& [k, b] : blocks) {
      csv += csv_escape(k) + "," + format_double(b.precision) + "," +
             format_double(b.recall) + "," + format_double(b.f1) + "," +
             format_double(b.se_f1) + "," + std::to_string(b.n) + "\n";
    }
    return csv;
  };
  write_file_atomic(sibling("strata_type"), dump(report.by_type));
  write_file_atomic(sibling("strata_size"), dump(report.by_size));
  write_file_atomic(sibling("strata_publisher"), dump(report.by_publisher));
}

}  // namespace vset

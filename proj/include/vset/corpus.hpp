// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vset {

/// One code within a value set. The pair (code, system) is the identity
/// key; display is advisory and may be empty.
struct CodeEntry {
  std::string code;
  std::string system;
  std::string display;

  bool operator==(const CodeEntry& other) const = default;
};

enum class VsType {
  kConditionClinical,
  kConditionDiagnosis,
  kMedication,
  kLabObservation,
  kProcedure,
  kOther,
};

std::string to_string(VsType t);
VsType vs_type_from_string(const std::string& s);

/// A curated value set: one clinical concept and its member codes.
struct ValueSet {
  std::string oid;
  std::string title;
  std::string description;
  std::string publisher;
  VsType vs_type = VsType::kOther;
  std::vector<CodeEntry> codes;
};

struct CorpusStats {
  std::size_t set_count = 0;
  std::map<int, std::size_t> size_quantiles;  // percentile -> code count
  double description_coverage = 0.0;
  double single_system_fraction = 0.0;
  std::map<std::size_t, std::size_t> systems_per_set_histogram;
  std::map<std::string, std::size_t> publisher_counts;
  std::map<std::string, std::size_t> type_counts;
};

/// Maps a code-system URI (or an already canonical short form) to its
/// canonical short form. Unrecognized inputs are returned unchanged; they
/// fall into the OTHER one-hot slot downstream. Total and idempotent.
std::string normalize_system_uri(const std::string& uri);

/// Parses one FHIR ValueSet expansion document. Duplicate (code, system)
/// pairs are collapsed keeping the first occurrence.
ValueSet parse_fhir_valueset(const std::string& json_text);

/// Keeps exactly the sets with at least three member codes, order preserved.
std::vector<ValueSet> filter_corpus(std::vector<ValueSet> sets);

/// Case-insensitive keyword rules applied in fixed priority order:
/// Medication, Lab/Observation, Procedure, Condition/Diagnosis,
/// Condition/Clinical; no rule fires -> Other. The rule table lives in
/// corpus.cpp next to this function.
VsType infer_value_set_type(const std::string& title);

/// Percentiles are nearest-rank (no interpolation).
CorpusStats corpus_stats(const std::vector<ValueSet>& sets);

/// Synthetic corpus generator configuration. Size defaults give a
/// heavy-tailed distribution with median ~9 and 95th percentile ~312.
struct SynthConfig {
  int topic_count = 50;
  int sets_per_topic = 40;
  std::uint64_t seed = 1;
  double size_log_mean = 2.1972245773362196;   // ln 9
  double size_log_sigma = 2.1556;              // p95/median = 312/9
  int max_set_size = 600;
  int catalog_size = 600;        // codes per topic catalogue
  double own_topic_fraction = 0.7;
  double mixed_system_rate = 0.15;
  double popularity_alpha = 1.15;  // Zipf exponent over catalogue ranks
  double description_rate = 0.2;
  int publisher_count = 40;
  double publisher_zipf = 1.2;
};

SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json synth_config_to_json(const SynthConfig& c);

/// Deterministic given the seed: integer-seeded RNG, no ambient randomness.
std::vector<ValueSet> generate_synthetic_corpus(const SynthConfig& config);

// Canonical line-delimited JSON corpus format, one value set per line.
nlohmann::json value_set_to_json(const ValueSet& vs);
ValueSet value_set_from_json(const nlohmann::json& j);
void write_corpus_jsonl(const std::filesystem::path& path,
                        const std::vector<ValueSet>& sets);
std::vector<ValueSet> read_corpus_jsonl(const std::filesystem::path& path);

nlohmann::json corpus_stats_to_json(const CorpusStats& stats);
/// Writes stats as JSON plus one CSV table per histogram next to it.
void write_corpus_stats(const std::filesystem::path& json_path,
                        const CorpusStats& stats);

}  // namespace vset

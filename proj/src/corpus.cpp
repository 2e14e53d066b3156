// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "vset/error.hpp"
#include "vset/io_util.hpp"
#include "vset/log.hpp"
#include "vset/rng.hpp"

namespace vset {

using nlohmann::json;

std::string to_string(VsType t) {
  switch (t) {
    case VsType::kConditionClinical: return "Condition/Clinical";
    case VsType::kConditionDiagnosis: return "Condition/Diagnosis";
    case VsType::kMedication: return "Medication";
    case VsType::kLabObservation: return "Lab/Observation";
    case VsType::kProcedure: return "Procedure";
    case VsType::kOther: return "Other";
  }
  return "Other";
}

VsType vs_type_from_string(const std::string& s) {
  if (s == "Condition/Clinical") return VsType::kConditionClinical;
  if (s == "Condition/Diagnosis") return VsType::kConditionDiagnosis;
  if (s == "Medication") return VsType::kMedication;
  if (s == "Lab/Observation") return VsType::kLabObservation;
  if (s == "Procedure") return VsType::kProcedure;
  if (s == "Other") return VsType::kOther;
  throw Error(Errc::kBadRecord, "unknown value set type: " + s);
}

namespace {

// Canonical short forms plus the URI / URN spellings seen in FHIR
// expansions. Unlisted inputs pass through unchanged.
const std::unordered_map<std::string, std::string>& system_table() {
  static const std::unordered_map<std::string, std::string> table = {
      {"SNOMED-CT", "SNOMED-CT"},
      {"http://snomed.info/sct", "SNOMED-CT"},
      {"urn:oid:2.16.840.1.113883.6.96", "SNOMED-CT"},
      {"SNOMEDCT", "SNOMED-CT"},
      {"SNOMED CT", "SNOMED-CT"},
      {"ICD-10-CM", "ICD-10-CM"},
      {"http://hl7.org/fhir/sid/icd-10-cm", "ICD-10-CM"},
      {"urn:oid:2.16.840.1.113883.6.90", "ICD-10-CM"},
      {"ICD10CM", "ICD-10-CM"},
      {"RxNorm", "RxNorm"},
      {"http://www.nlm.nih.gov/research/umls/rxnorm", "RxNorm"},
      {"urn:oid:2.16.840.1.113883.6.88", "RxNorm"},
      {"RXNORM", "RxNorm"},
      {"LOINC", "LOINC"},
      {"http://loinc.org", "LOINC"},
      {"urn:oid:2.16.840.1.113883.6.1", "LOINC"},
      {"CPT", "CPT"},
      {"http://www.ama-assn.org/go/cpt", "CPT"},
      {"urn:oid:2.16.840.1.113883.6.12", "CPT"},
      {"ICD-10-PCS", "ICD-10-PCS"},
      {"http://www.cms.gov/Medicare/Coding/ICD10", "ICD-10-PCS"},
      {"urn:oid:2.16.840.1.113883.6.4", "ICD-10-PCS"},
      {"ICD10PCS", "ICD-10-PCS"},
      {"HCPCS", "HCPCS"},
      {"urn:oid:2.16.840.1.113883.6.285", "HCPCS"},
      {"https://www.cms.gov/Medicare/Coding/HCPCSReleaseCodeSets", "HCPCS"},
  };
  return table;
}

}  // namespace

std::string normalize_system_uri(const std::string& uri) {
  const auto& table = system_table();
  auto it = table.find(uri);
  return it == table.end() ? uri : it->second;
}

namespace {

bool is_oid_like(std::string_view s) {
  if (s.empty()) return false;
  int dots = 0;
  bool digit_seen = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (!digit_seen || i + 1 == s.size()) return false;
      ++dots;
      digit_seen = false;
    } else if (c >= '0' && c <= '9') {
      digit_seen = true;
    } else {
      return false;
    }
  }
  return dots >= 1 && digit_seen;
}

std::string oid_from_url(const std::string& url) {
  std::string last;
  std::size_t start = 0;
  while (start <= url.size()) {
    std::size_t slash = url.find('/', start);
    std::string_view seg(url.data() + start,
                         (slash == std::string::npos ? url.size() : slash) -
                             start);
    if (is_oid_like(seg)) {
      last = std::string(seg);
    }
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return last;
}

}  // namespace

ValueSet parse_fhir_valueset(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(Errc::kMalformedDocument, "input is not a JSON object");
  }
  if (j.value("resourceType", std::string()) != "ValueSet") {
    throw Error(Errc::kMalformedDocument,
                "resourceType is not 'ValueSet'");
  }

  ValueSet vs;
  if (j.contains("url") && j["url"].is_string()) {
    vs.oid = oid_from_url(j["url"].get<std::string>());
  }
  if (vs.oid.empty() && j.contains("id") && j["id"].is_string()) {
    vs.oid = j["id"].get<std::string>();
  }
  if (vs.oid.empty()) {
    throw Error(Errc::kMalformedDocument, "no usable oid in 'url' or 'id'");
  }

  if (j.contains("title") && j["title"].is_string() &&
      !j["title"].get<std::string>().empty()) {
    vs.title = j["title"].get<std::string>();
  } else if (j.contains("name") && j["name"].is_string() &&
             !j["name"].get<std::string>().empty()) {
    vs.title = j["name"].get<std::string>();
  } else {
    throw Error(Errc::kMissingTitle, "oid " + vs.oid);
  }

  vs.publisher = j.value("publisher", std::string());
  vs.description = j.value("description", std::string());

  if (!j.contains("expansion") || !j["expansion"].is_object() ||
      !j["expansion"].contains("contains") ||
      !j["expansion"]["contains"].is_array()) {
    throw Error(Errc::kMissingExpansion, "oid " + vs.oid);
  }

  std::unordered_set<std::string> seen;
  for (const auto& entry : j["expansion"]["contains"]) {
    if (!entry.is_object()) continue;
    std::string code = entry.value("code", std::string());
    std::string system = entry.value("system", std::string());
    if (code.empty() || system.empty()) {
      log::warn("skipping expansion entry without code/system in oid " +
                vs.oid);
      continue;
    }
    system = normalize_system_uri(system);
    std::string key = code + '\x1f' + system;
    if (!seen.insert(key).second) {
      log::warn("duplicate (code, system) in oid " + vs.oid + ": " + code +
                " / " + system + "; keeping first");
      continue;
    }
    vs.codes.push_back({std::move(code), std::move(system),
                        entry.value("display", std::string())});
  }

  vs.vs_type = infer_value_set_type(vs.title);
  return vs;
}

std::vector<ValueSet> filter_corpus(std::vector<ValueSet> sets) {
  std::erase_if(sets, [](const ValueSet& vs) { return vs.codes.size() < 3; });
  return sets;
}

namespace {

std::vector<std::string> tokenize_lower(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

struct TypeRule {
  VsType type;
  std::vector<std::string_view> words;     // whole-token match
  std::vector<std::string_view> suffixes;  // token ends-with match
};

// Applied in order; first hit wins. The table is ours: the reference
// corpus publishes only the inferred distribution, not its rules.
const std::array<TypeRule, 5>& type_rules() {
  static const std::array<TypeRule, 5> rules = {{
      {VsType::kMedication,
       {"medication", "medications", "drug", "drugs", "antibiotic",
        "antibiotics", "vaccine", "vaccines", "pharmacotherapy", "ingredient",
        "antidepressant", "antidepressants", "opioid", "opioids", "insulin"},
       {"statin", "cillin", "mycin", "azole", "pril", "sartan", "dipine",
        "prazole", "formin", "parin", "ximab", "zumab"}},
      {VsType::kLabObservation,
       {"lab", "labs", "test", "tests", "assay", "assays", "result",
        "results", "observation", "observations", "measurement",
        "measurements", "specimen", "culture", "titer"},
       {}},
      {VsType::kProcedure,
       {"procedure", "procedures", "surgery", "surgeries", "surgical",
        "biopsy", "excision", "transplant", "imaging"},
       {"ectomy", "oscopy", "otomy", "plasty"}},
      {VsType::kConditionDiagnosis,
       {"diagnosis", "diagnoses", "dx"},
       {}},
      {VsType::kConditionClinical,
       {"disease", "diseases", "disorder", "disorders", "syndrome",
        "syndromes", "condition", "conditions", "infection", "infections",
        "injury", "failure", "deficiency", "dependence"},
       {"itis", "emia", "pathy", "osis", "algia"}},
  }};
  return rules;
}

}  // namespace

VsType infer_value_set_type(const std::string& title) {
  const auto tokens = tokenize_lower(title);
  for (const auto& rule : type_rules()) {
    for (const auto& tok : tokens) {
      for (auto w : rule.words) {
        if (tok == w) return rule.type;
      }
      for (auto suf : rule.suffixes) {
        if (tok.size() > suf.size() + 2 &&
            std::string_view(tok).ends_with(suf)) {
          return rule.type;
        }
      }
    }
  }
  return VsType::kOther;
}

CorpusStats corpus_stats(const std::vector<ValueSet>& sets) {
  if (sets.empty()) {
    throw Error(Errc::kEmptyCorpus, "corpus_stats over empty corpus");
  }
  CorpusStats stats;
  stats.set_count = sets.size();

  std::vector<std::size_t> sizes;
  sizes.reserve(sets.size());
  std::size_t with_description = 0;
  std::size_t single_system = 0;
  for (const auto& vs : sets) {
    sizes.push_back(vs.codes.size());
    if (!vs.description.empty()) ++with_description;
    std::unordered_set<std::string> systems;
    for (const auto& c : vs.codes) systems.insert(c.system);
    if (systems.size() == 1) ++single_system;
    ++stats.systems_per_set_histogram[systems.size()];
    ++stats.publisher_counts[vs.publisher];
    ++stats.type_counts[to_string(vs.vs_type)];
  }
  std::sort(sizes.begin(), sizes.end());

  // Nearest-rank: the p-th percentile is the ceil(p/100 * n)-th smallest.
  const std::size_t n = sizes.size();
  for (int p : {1, 5, 10, 25, 50, 75, 90, 95, 99}) {
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(static_cast<double>(p) / 100.0 * static_cast<double>(n)));
    rank = std::max<std::size_t>(rank, 1);
    stats.size_quantiles[p] = sizes[rank - 1];
  }

  stats.description_coverage =
      static_cast<double>(with_description) / static_cast<double>(n);
  stats.single_system_fraction =
      static_cast<double>(single_system) / static_cast<double>(n);
  return stats;
}

// ---------------------------------------------------------------------------
// Synthetic corpus generation

namespace {

constexpr std::array<std::string_view, 7> kSynthSystems = {
    "SNOMED-CT", "ICD-10-CM", "RxNorm", "LOINC",
    "CPT",       "ICD-10-PCS", "HCPCS"};

const std::vector<std::string>& topic_nouns() {
  static const std::vector<std::string> nouns = {
      "asthma", "type 2 diabetes", "hypertension", "chronic kidney disease",
      "migraine", "atrial fibrillation", "heart failure",
      "chronic obstructive pulmonary", "pneumonia", "major depression",
      "generalized anxiety", "osteoporosis", "rheumatoid arthritis",
      "psoriasis", "epilepsy", "ischemic stroke", "obesity", "anemia",
      "hypothyroidism", "hyperlipidemia", "glaucoma", "cataract", "dementia",
      "parkinson", "multiple sclerosis", "hepatitis c", "tuberculosis",
      "influenza", "sepsis", "appendicitis", "cholecystitis", "pancreatitis",
      "endometriosis", "prostate cancer", "breast cancer",
      "colorectal cancer", "lung cancer", "melanoma", "leukemia", "lymphoma",
      "sleep apnea", "gout", "cellulitis", "urinary tract infection",
      "otitis media", "sinusitis", "bronchitis", "gastroesophageal reflux",
      "peptic ulcer", "irritable bowel", "crohn", "ulcerative colitis",
      "celiac", "cystic fibrosis", "sickle cell", "hemophilia",
      "schizophrenia", "bipolar", "autism spectrum",
      "attention deficit", "chronic pain", "low back pain",
      "osteoarthritis", "fibromyalgia"};
  return nouns;
}

const std::vector<std::vector<std::string>>& type_modifiers() {
  // Index order mirrors VsType.
  static const std::vector<std::vector<std::string>> mods = {
      {"disease codes", "condition set", "disorder codes",
       "related disorders", "chronic condition", "comorbid conditions"},
      {"diagnosis", "diagnosis codes", "primary diagnosis", "dx group",
       "differential diagnoses", "admitting diagnosis"},
      {"medications", "drug therapy", "medication list",
       "maintenance medications", "drug classes", "combination drugs"},
      {"lab test", "lab results", "screening assay", "lab panel",
       "test results", "observation codes"},
      {"procedure", "surgery codes", "surgical procedures",
       "procedure group", "outpatient procedures", "operative procedures"},
  };
  return mods;
}

const std::vector<std::string>& display_adjectives() {
  static const std::vector<std::string> v = {
      "acute", "chronic", "severe", "mild", "moderate", "recurrent",
      "persistent", "unspecified", "initial", "subsequent", "complicated",
      "uncomplicated", "early onset", "late onset", "primary", "secondary",
      "refractory", "stable", "unstable", "episodic", "progressive",
      "benign", "hereditary", "familial"};
  return v;
}

const std::vector<std::string>& display_qualifiers() {
  static const std::vector<std::string> v = {
      "episode", "encounter", "with remission", "without complication",
      "with complication", "stage 1", "stage 2", "stage 3", "follow up",
      "screening", "assessment", "therapy", "treatment", "evaluation",
      "exacerbation", "remission", "onset", "history", "sequela",
      "manifestation", "finding", "status", "observation", "variant",
      "presentation"};
  return v;
}

const std::vector<std::string>& title_suffixes() {
  static const std::vector<std::string> v = {"",        "",        "",
                                             "",        "v2",      "extended",
                                             "core",    "primary", "pediatric",
                                             "adult"};
  return v;
}

struct Topic {
  std::string noun;
  std::string system;
  int type_index = 0;  // into type_modifiers()
  std::vector<CodeEntry> catalog;
  std::vector<double> weights;  // popularity, parallel to catalog
};

// Weighted sampling without replacement (Efraimidis-Spirakis keys).
// Candidates carry (topic, catalog index, weight).
struct Candidate {
  int topic;
  int idx;
  double weight;
};

std::vector<std::pair<int, int>> weighted_sample(std::vector<Candidate> cands,
                                                 std::size_t k, Rng& rng) {
  struct Keyed {
    double key;
    std::size_t ord;
  };
  std::vector<Keyed> keys(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    keys[i] = {std::log(u) / cands[i].weight, i};
  }
  std::sort(keys.begin(), keys.end(), [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.ord < b.ord;
  });
  k = std::min(k, cands.size());
  std::vector<std::pair<int, int>> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& c = cands[keys[i].ord];
    out.emplace_back(c.topic, c.idx);
  }
  return out;
}

}  // namespace

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig c;
  c.topic_count = j.value("topic_count", c.topic_count);
  c.sets_per_topic = j.value("sets_per_topic", c.sets_per_topic);
  c.seed = j.value("seed", c.seed);
  c.size_log_mean = j.value("size_log_mean", c.size_log_mean);
  c.size_log_sigma = j.value("size_log_sigma", c.size_log_sigma);
  c.max_set_size = j.value("max_set_size", c.max_set_size);
  c.catalog_size = j.value("catalog_size", c.catalog_size);
  c.own_topic_fraction = j.value("own_topic_fraction", c.own_topic_fraction);
  c.mixed_system_rate = j.value("mixed_system_rate", c.mixed_system_rate);
  c.popularity_alpha = j.value("popularity_alpha", c.popularity_alpha);
  c.description_rate = j.value("description_rate", c.description_rate);
  c.publisher_count = j.value("publisher_count", c.publisher_count);
  c.publisher_zipf = j.value("publisher_zipf", c.publisher_zipf);
  return c;
}

json synth_config_to_json(const SynthConfig& c) {
  return json{{"topic_count", c.topic_count},
              {"sets_per_topic", c.sets_per_topic},
              {"seed", c.seed},
              {"size_log_mean", c.size_log_mean},
              {"size_log_sigma", c.size_log_sigma},
              {"max_set_size", c.max_set_size},
              {"catalog_size", c.catalog_size},
              {"own_topic_fraction", c.own_topic_fraction},
              {"mixed_system_rate", c.mixed_system_rate},
              {"popularity_alpha", c.popularity_alpha},
              {"description_rate", c.description_rate},
              {"publisher_count", c.publisher_count},
              {"publisher_zipf", c.publisher_zipf}};
}

std::vector<ValueSet> generate_synthetic_corpus(const SynthConfig& config) {
  if (config.topic_count < 1 || config.sets_per_topic < 1 ||
      config.catalog_size < 3 || config.publisher_count < 1 ||
      config.own_topic_fraction <= 0.0 || config.own_topic_fraction > 1.0 ||
      config.size_log_sigma < 0.0 || config.max_set_size < 3) {
    throw Error(Errc::kInvalidConfig, "bad synthetic corpus config");
  }

  Rng rng(config.seed);
  const int T = config.topic_count;
  const int C = config.catalog_size;
  const auto& nouns = topic_nouns();
  const auto& adjs = display_adjectives();
  const auto& quals = display_qualifiers();

  // Topics are grouped into contiguous blocks, one code system per block,
  // so that neighbor draws stay single-system.
  const int block = (T + static_cast<int>(kSynthSystems.size()) - 1) /
                    static_cast<int>(kSynthSystems.size());

  std::vector<Topic> topics(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Topic& topic = topics[static_cast<std::size_t>(t)];
    topic.noun = nouns[static_cast<std::size_t>(t) % nouns.size()];
    if (static_cast<std::size_t>(t) >= nouns.size()) {
      topic.noun +=
          " group " +
          std::to_string(static_cast<std::size_t>(t) / nouns.size() + 1);
    }
    topic.system = std::string(
        kSynthSystems[static_cast<std::size_t>(t / block) %
                      kSynthSystems.size()]);
    // Condition types dominate, mirroring a typical clinical corpus.
    const double r = rng.uniform();
    if (r < 0.30) topic.type_index = 0;
    else if (r < 0.58) topic.type_index = 1;
    else if (r < 0.74) topic.type_index = 2;
    else if (r < 0.90) topic.type_index = 3;
    else topic.type_index = 4;

    topic.catalog.reserve(static_cast<std::size_t>(C));
    topic.weights.reserve(static_cast<std::size_t>(C));
    for (int i = 0; i < C; ++i) {
      std::string display =
          topic.noun + " " + adjs[static_cast<std::size_t>(i) % adjs.size()] +
          " " +
          quals[(static_cast<std::size_t>(i) / adjs.size()) % quals.size()];
      if (static_cast<std::size_t>(i) >= adjs.size() * quals.size()) {
        display += " " + std::to_string(i);
      }
      std::string code = std::to_string(100000 + t * C + i);
      topic.catalog.push_back({std::move(code), topic.system,
                               std::move(display)});
      topic.weights.push_back(
          std::pow(static_cast<double>(i + 1), -config.popularity_alpha));
    }
  }

  // Concentrated publisher distribution.
  std::vector<std::string> publishers;
  std::vector<double> pub_cdf;
  {
    double total = 0.0;
    for (int k = 1; k <= config.publisher_count; ++k) {
      total += std::pow(static_cast<double>(k), -config.publisher_zipf);
    }
    double acc = 0.0;
    for (int k = 1; k <= config.publisher_count; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "Publisher-%02d", k);
      publishers.emplace_back(buf);
      acc += std::pow(static_cast<double>(k), -config.publisher_zipf) / total;
      pub_cdf.push_back(acc);
    }
    pub_cdf.back() = 1.0;
  }

  const auto block_of = [&](int t) { return t / block; };

  std::vector<ValueSet> sets;
  sets.reserve(static_cast<std::size_t>(T) *
               static_cast<std::size_t>(config.sets_per_topic));
  for (int t = 0; t < T; ++t) {
    const Topic& topic = topics[static_cast<std::size_t>(t)];
    const int b_start = block_of(t) * block;
    const int b_end = std::min(T, b_start + block);
    const int b_len = b_end - b_start;

    const auto& mods = type_modifiers()[static_cast<std::size_t>(
        topic.type_index)];
    for (int s_idx = 0; s_idx < config.sets_per_topic; ++s_idx) {
      ValueSet vs;
      vs.oid = "2.16.840.1." + std::to_string(1000 + t) + "." +
               std::to_string(s_idx + 1);

      const auto& mod = mods[rng.uniform_int(mods.size())];
      const auto& suffix =
          title_suffixes()[rng.uniform_int(title_suffixes().size())];
      vs.title = topic.noun + " " + mod;
      if (!suffix.empty()) vs.title += " " + suffix;
      vs.vs_type = infer_value_set_type(vs.title);

      int size = static_cast<int>(std::llround(
          rng.lognormal(config.size_log_mean, config.size_log_sigma)));
      size = std::clamp(size, 3,
                        std::min(config.max_set_size, config.catalog_size));

      const bool mixed = rng.uniform() < config.mixed_system_rate && T >= 2;
      vs.publisher = publishers[static_cast<std::size_t>(
          std::lower_bound(pub_cdf.begin(), pub_cdf.end(), rng.uniform()) -
          pub_cdf.begin())];
      if (rng.uniform() < config.description_rate) {
        vs.description = "Codes covering " + vs.title + ".";
      }

      int own_count = std::min(
          size, static_cast<int>(std::ceil(config.own_topic_fraction *
                                           static_cast<double>(size))));
      int far_count = mixed ? std::max(1, size / 12) : 0;
      int neighbor_count = std::max(0, size - own_count - far_count);

      // Own-topic draws, popularity-weighted.
      std::vector<Candidate> own;
      own.reserve(topic.catalog.size());
      for (int i = 0; i < C; ++i) {
        own.push_back({t, i, topic.weights[static_cast<std::size_t>(i)]});
      }
      auto picks = weighted_sample(std::move(own),
                                   static_cast<std::size_t>(own_count), rng);

      // Neighbor topics within the block (same system), distance-decayed.
      // Small blocks wrap, so distinct deltas can land on the same topic;
      // keep the first (nearest).
      if (neighbor_count > 0) {
        std::vector<std::pair<int, double>> neighbor_topics;
        for (int delta : {1, -1, 2, -2}) {
          if (b_len <= 1) break;
          int other = b_start + ((t - b_start + delta) % b_len + b_len) % b_len;
          if (other == t) continue;
          bool seen = false;
          for (const auto& [topic_id, decay] : neighbor_topics) {
            if (topic_id == other) seen = true;
          }
          if (seen) continue;
          neighbor_topics.emplace_back(
              other, 1.0 / static_cast<double>(std::abs(delta)));
        }
        std::vector<Candidate> nb;
        for (const auto& [other, decay] : neighbor_topics) {
          const Topic& o = topics[static_cast<std::size_t>(other)];
          for (int i = 0; i < C; ++i) {
            nb.push_back({other, i,
                          o.weights[static_cast<std::size_t>(i)] * decay});
          }
        }
        if (nb.empty()) {
          // Single-topic block: no distinct neighbors, keep the set pure.
          neighbor_count = 0;
        } else {
          auto extra = weighted_sample(
              std::move(nb), static_cast<std::size_t>(neighbor_count), rng);
          picks.insert(picks.end(), extra.begin(), extra.end());
        }
      }

      if (far_count > 0) {
        int far_topic = (t + T / 2) % T;
        if (far_topic != t) {
          const Topic& f = topics[static_cast<std::size_t>(far_topic)];
          std::vector<Candidate> fc;
          fc.reserve(f.catalog.size());
          for (int i = 0; i < C; ++i) {
            fc.push_back(
                {far_topic, i, f.weights[static_cast<std::size_t>(i)]});
          }
          auto extra = weighted_sample(std::move(fc),
                                       static_cast<std::size_t>(far_count),
                                       rng);
          picks.insert(picks.end(), extra.begin(), extra.end());
        }
      }

      vs.codes.reserve(picks.size());
      for (const auto& [pt, pi] : picks) {
        vs.codes.push_back(topics[static_cast<std::size_t>(pt)]
                               .catalog[static_cast<std::size_t>(pi)]);
      }
      sets.push_back(std::move(vs));
    }
  }
  return sets;
}

// ---------------------------------------------------------------------------
// Canonical JSONL corpus format

json value_set_to_json(const ValueSet& vs) {
  json codes = json::array();
  for (const auto& c : vs.codes) {
    codes.push_back(
        {{"code", c.code}, {"system", c.system}, {"display", c.display}});
  }
  return json{{"oid", vs.oid},
              {"title", vs.title},
              {"description", vs.description},
              {"publisher", vs.publisher},
              {"vs_type", to_string(vs.vs_type)},
              {"codes", std::move(codes)}};
}

ValueSet value_set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("oid") || !j.contains("title") ||
      !j.contains("codes") || !j["codes"].is_array()) {
    throw Error(Errc::kBadRecord, "corpus line missing required fields");
  }
  ValueSet vs;
  vs.oid = j["oid"].get<std::string>();
  vs.title = j["title"].get<std::string>();
  vs.description = j.value("description", std::string());
  vs.publisher = j.value("publisher", std::string());
  vs.vs_type = vs_type_from_string(j.value("vs_type", std::string("Other")));
  for (const auto& c : j["codes"]) {
    vs.codes.push_back({c.value("code", std::string()),
                        c.value("system", std::string()),
                        c.value("display", std::string())});
  }
  return vs;
}

void write_corpus_jsonl(const std::filesystem::path& path,
                        const std::vector<ValueSet>& sets) {
  std::string out;
  for (const auto& vs : sets) {
    out += value_set_to_json(vs).dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<ValueSet> read_corpus_jsonl(const std::filesystem::path& path) {
  std::vector<ValueSet> sets;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      throw Error(Errc::kBadRecord, path.string() + " line " +
                                        std::to_string(line_no) +
                                        ": invalid JSON");
    }
    try {
      sets.push_back(value_set_from_json(j));
    } catch (const Error& e) {
      throw Error(Errc::kBadRecord, path.string() + " line " +
                                        std::to_string(line_no) + ": " +
                                        e.what());
    }
  }
  return sets;
}

json corpus_stats_to_json(const CorpusStats& stats) {
  json quantiles = json::object();
  for (const auto& [p, v] : stats.size_quantiles) {
    quantiles["p" + std::to_string(p)] = v;
  }
  json systems = json::object();
  for (const auto& [k, v] : stats.systems_per_set_histogram) {
    systems[std::to_string(k)] = v;
  }
  return json{{"set_count", stats.set_count},
              {"size_quantiles", std::move(quantiles)},
              {"description_coverage", stats.description_coverage},
              {"single_system_fraction", stats.single_system_fraction},
              {"systems_per_set_histogram", std::move(systems)},
              {"publisher_counts", stats.publisher_counts},
              {"type_counts", stats.type_counts}};
}

void write_corpus_stats(const std::filesystem::path& json_path,
                        const CorpusStats& stats) {
  write_file_atomic(json_path, corpus_stats_to_json(stats).dump(2) + "\n");

  auto csv_sibling = [&](const std::string& name) {
    auto p = json_path;
    p.replace_extension();
    p += "." + name + ".csv";
    return p;
  };
  {
    std::string csv = "systems_per_set,count\n";
    for (const auto& [k, v] : stats.systems_per_set_histogram) {
      csv += std::to_string(k) + "," + std::to_string(v) + "\n";
    }
    write_file_atomic(csv_sibling("systems_per_set"), csv);
  }
  {
    std::string csv = "publisher,count\n";
    for (const auto& [k, v] : stats.publisher_counts) {
      csv += csv_escape(k) + "," + std::to_string(v) + "\n";
    }
    write_file_atomic(csv_sibling("publishers"), csv);
  }
  {
    std::string csv = "vs_type,count\n";
    for (const auto& [k, v] : stats.type_counts) {
      csv += csv_escape(k) + "," + std::to_string(v) + "\n";
    }
    write_file_atomic(csv_sibling("types"), csv);
  }
}

}  // namespace vset

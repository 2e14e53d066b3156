// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>
#include <unordered_set>

#include "vset/corpus.hpp"
#include "vset/error.hpp"

using namespace vset;

namespace {

ValueSet make_set(const std::string& oid, std::size_t n_codes,
                  const std::string& system = "SNOMED-CT") {
  ValueSet vs;
  vs.oid = oid;
  vs.title = "set " + oid;
  vs.publisher = "P";
  for (std::size_t i = 0; i < n_codes; ++i) {
    vs.codes.push_back({"c" + std::to_string(i), system, "display"});
  }
  return vs;
}

}  // namespace

TEST_CASE("normalize_system_uri canonical forms") {
  CHECK(normalize_system_uri("http://www.nlm.nih.gov/research/umls/rxnorm") ==
        "RxNorm");
  CHECK(normalize_system_uri("http://snomed.info/sct") == "SNOMED-CT");
  CHECK(normalize_system_uri("SNOMED-CT") == "SNOMED-CT");
  CHECK(normalize_system_uri("urn:example:unknown-system") ==
        "urn:example:unknown-system");
}

TEST_CASE("normalize_system_uri is idempotent") {
  const std::vector<std::string> inputs = {
      "http://snomed.info/sct", "http://loinc.org", "CPT", "ICD-10-PCS",
      "urn:oid:2.16.840.1.113883.6.285", "whatever", "RxNorm", ""};
  for (const auto& uri : inputs) {
    if (uri.empty()) continue;
    CHECK(normalize_system_uri(normalize_system_uri(uri)) ==
          normalize_system_uri(uri));
  }
}

TEST_CASE("parse_fhir_valueset basic mapping") {
  const std::string doc = R"({
    "resourceType": "ValueSet",
    "id": "2.16.1",
    "title": "Asthma",
    "publisher": "X",
    "expansion": {"contains": [
      {"system": "http://snomed.info/sct", "code": "195967001",
       "display": "Asthma"}
    ]}
  })";
  const ValueSet vs = parse_fhir_valueset(doc);
  CHECK(vs.oid == "2.16.1");
  CHECK(vs.title == "Asthma");
  CHECK(vs.publisher == "X");
  REQUIRE(vs.codes.size() == 1);
  CHECK(vs.codes[0].code == "195967001");
  CHECK(vs.codes[0].system == "SNOMED-CT");
  CHECK(vs.codes[0].display == "Asthma");
}

TEST_CASE("parse_fhir_valueset dedups by identity key") {
  const std::string doc = R"({
    "resourceType": "ValueSet", "id": "2.16.1", "title": "Asthma",
    "expansion": {"contains": [
      {"system": "http://snomed.info/sct", "code": "195967001"},
      {"system": "SNOMED-CT", "code": "195967001"}
    ]}
  })";
  CHECK(parse_fhir_valueset(doc).codes.size() == 1);
}

TEST_CASE("parse_fhir_valueset oid from url takes precedence") {
  const std::string doc = R"({
    "resourceType": "ValueSet", "id": "local-id",
    "url": "http://cts.example.org/fhir/ValueSet/2.16.840.1.113762.1.4.1096.141",
    "name": "Asthma", "expansion": {"contains": []}
  })";
  CHECK(parse_fhir_valueset(doc).oid == "2.16.840.1.113762.1.4.1096.141");
}

TEST_CASE("parse_fhir_valueset error paths") {
  auto code_of = [](const std::string& doc) {
    try {
      (void)parse_fhir_valueset(doc);
      return Errc::kConfigError;  // placeholder; should not happen
    } catch (const Error& e) {
      return e.code();
    }
  };
  CHECK(code_of(R"({"resourceType":"Patient"})") == Errc::kMalformedDocument);
  CHECK(code_of("not json at all") == Errc::kMalformedDocument);
  CHECK(code_of(R"({"resourceType":"ValueSet","id":"1.2","title":"T"})") ==
        Errc::kMissingExpansion);
  CHECK(code_of(
            R"({"resourceType":"ValueSet","id":"1.2","expansion":{"contains":[]}})") ==
        Errc::kMissingTitle);
}

TEST_CASE("filter_corpus boundary at three codes") {
  std::vector<ValueSet> sets;
  sets.push_back(make_set("a", 2));
  sets.push_back(make_set("b", 3));
  const auto filtered = filter_corpus(sets);
  REQUIRE(filtered.size() == 1);
  CHECK(filtered[0].oid == "b");

  CHECK(filter_corpus({}).empty());

  std::vector<ValueSet> ten;
  for (std::size_t n = 1; n <= 10; ++n) {
    ten.push_back(make_set("s" + std::to_string(n), n));
  }
  CHECK(filter_corpus(ten).size() == 8);
}

TEST_CASE("filter_corpus is idempotent and preserves order") {
  std::vector<ValueSet> sets;
  for (std::size_t n : {5, 1, 7, 2, 3}) {
    sets.push_back(make_set("s" + std::to_string(n), n));
  }
  const auto once = filter_corpus(sets);
  const auto twice = filter_corpus(once);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].oid == twice[i].oid);
    CHECK(once[i].codes.size() >= 3);
  }
  CHECK(once[0].oid == "s5");
  CHECK(once[1].oid == "s7");
}

TEST_CASE("infer_value_set_type keyword rules") {
  CHECK(infer_value_set_type("Diabetes Medications") == VsType::kMedication);
  CHECK(infer_value_set_type("Hemoglobin A1c Lab Test") ==
        VsType::kLabObservation);
  CHECK(infer_value_set_type("Quarterly Reporting Bundle") == VsType::kOther);
  CHECK(infer_value_set_type("Appendectomy procedures") ==
        VsType::kProcedure);
  CHECK(infer_value_set_type("Hypertension Diagnosis") ==
        VsType::kConditionDiagnosis);
  CHECK(infer_value_set_type("Chronic Kidney Disease") ==
        VsType::kConditionClinical);
  // Priority: medication wins over the condition noun.
  CHECK(infer_value_set_type("asthma medications") == VsType::kMedication);
}

TEST_CASE("corpus_stats nearest-rank quantiles and fractions") {
  std::vector<ValueSet> sets;
  sets.push_back(make_set("a", 3));
  sets.push_back(make_set("b", 9));
  sets.push_back(make_set("c", 300));
  auto stats = corpus_stats(sets);
  CHECK(stats.size_quantiles.at(50) == 9);
  CHECK(stats.set_count == 3);

  std::vector<ValueSet> five;
  for (int i = 0; i < 5; ++i) {
    five.push_back(make_set("s" + std::to_string(i), 3));
  }
  five[2].description = "described";
  stats = corpus_stats(five);
  CHECK(stats.description_coverage == doctest::Approx(0.2));

  CHECK_THROWS_AS((void)corpus_stats({}), Error);
}

TEST_CASE("corpus_stats histogram sums to set count") {
  SynthConfig config;
  config.topic_count = 10;
  config.sets_per_topic = 30;
  config.seed = 5;
  const auto sets = generate_synthetic_corpus(config);
  const auto stats = corpus_stats(sets);

  std::size_t hist_total = 0;
  for (const auto& [k, v] : stats.systems_per_set_histogram) hist_total += v;
  CHECK(hist_total == stats.set_count);

  std::size_t type_total = 0;
  for (const auto& [k, v] : stats.type_counts) type_total += v;
  CHECK(type_total == stats.set_count);

  CHECK(stats.description_coverage >= 0.0);
  CHECK(stats.description_coverage <= 1.0);
  CHECK(stats.single_system_fraction >= 0.0);
  CHECK(stats.single_system_fraction <= 1.0);
}

TEST_CASE("synthetic corpus is deterministic per seed") {
  SynthConfig config;
  config.topic_count = 6;
  config.sets_per_topic = 10;
  config.seed = 7;
  const auto a = generate_synthetic_corpus(config);
  const auto b = generate_synthetic_corpus(config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(value_set_to_json(a[i]).dump() == value_set_to_json(b[i]).dump());
  }

  config.seed = 8;
  const auto c = generate_synthetic_corpus(config);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size() && !any_diff; ++i) {
    any_diff = value_set_to_json(a[i]).dump() !=
               value_set_to_json(c[i]).dump();
  }
  CHECK(any_diff);
}

TEST_CASE("synthetic corpus hits its statistical targets") {
  SynthConfig config;  // defaults target median ~9, p95 ~312
  config.seed = 42;
  const auto sets = generate_synthetic_corpus(config);
  REQUIRE(sets.size() == 2000);
  const auto stats = corpus_stats(sets);

  // Median size lands in [7, 11] for a 2,000-set corpus.
  CHECK(stats.size_quantiles.at(50) >= 7);
  CHECK(stats.size_quantiles.at(50) <= 11);
  // Heavy tail: p95 within a loose band around 312.
  CHECK(stats.size_quantiles.at(95) >= 150);
  // At least 80% single-system.
  CHECK(stats.single_system_fraction >= 0.80);
  // All sets respect the post-filter floor.
  for (const auto& vs : sets) CHECK(vs.codes.size() >= 3);
  // No duplicate (code, system) within a set.
  for (const auto& vs : sets) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& c : vs.codes) {
      CHECK(seen.emplace(c.code, c.system).second);
    }
  }
}

TEST_CASE("same-topic sets overlap more than distant-topic sets") {
  SynthConfig config;
  config.topic_count = 20;
  config.sets_per_topic = 20;
  config.seed = 9;
  const auto sets = generate_synthetic_corpus(config);

  auto keys = [](const ValueSet& vs) {
    std::unordered_set<std::string> out;
    for (const auto& c : vs.codes) out.insert(c.code + "|" + c.system);
    return out;
  };
  auto jaccard = [&](const ValueSet& a, const ValueSet& b) {
    const auto ka = keys(a);
    const auto kb = keys(b);
    std::size_t inter = 0;
    for (const auto& k : ka) inter += kb.count(k);
    const std::size_t uni = ka.size() + kb.size() - inter;
    return uni == 0 ? 0.0
                    : static_cast<double>(inter) / static_cast<double>(uni);
  };

  const int per = config.sets_per_topic;
  double same = 0.0, distant = 0.0;
  int pairs = 0;
  for (int t = 0; t < 10; ++t) {
    const auto& a = sets[static_cast<std::size_t>(t * per)];
    const auto& b = sets[static_cast<std::size_t>(t * per + 1)];
    // Distant topic: half the corpus away.
    const auto& c = sets[static_cast<std::size_t>(((t + 10) % 20) * per)];
    same += jaccard(a, b);
    distant += jaccard(a, c);
    ++pairs;
  }
  CHECK(same / pairs > distant / pairs);
}

TEST_CASE("corpus jsonl round trip") {
  SynthConfig config;
  config.topic_count = 4;
  config.sets_per_topic = 5;
  config.seed = 3;
  const auto sets = generate_synthetic_corpus(config);

  const auto path =
      std::filesystem::temp_directory_path() / "vset_corpus_rt.jsonl";
  write_corpus_jsonl(path, sets);
  const auto back = read_corpus_jsonl(path);
  REQUIRE(back.size() == sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    CHECK(value_set_to_json(back[i]) == value_set_to_json(sets[i]));
  }
  // Serialize -> parse -> serialize is a fixed point.
  write_corpus_jsonl(path, back);
  const auto again = read_corpus_jsonl(path);
  CHECK(value_set_to_json(again[0]) == value_set_to_json(back[0]));
}

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "vset/embed.hpp"
#include "vset/error.hpp"
#include "vset/eval.hpp"
#include "vset/features.hpp"
#include "vset/index.hpp"
#include "vset/io_util.hpp"
#include "vset/log.hpp"
#include "vset/persistence.hpp"
#include "vset/pool.hpp"
#include "vset/split.hpp"

namespace vset {

using nlohmann::json;

namespace {

std::filesystem::path defaulted(const std::filesystem::path& value,
                                const std::filesystem::path& workdir,
                                const char* name) {
  return value.empty() ? workdir / name : value;
}

void apply_path_defaults(PipelineConfig& c) {
  c.corpus_path = defaulted(c.corpus_path, c.workdir, "corpus.jsonl");
  c.titles_path = defaulted(c.titles_path, c.workdir, "titles.tbl");
  c.displays_path = defaulted(c.displays_path, c.workdir, "displays.tbl");
  c.index_path = defaulted(c.index_path, c.workdir, "index.bin");
  c.pools_path = defaulted(c.pools_path, c.workdir, "pools.jsonl");
  c.manifest_path = defaulted(c.manifest_path, c.workdir, "manifest.csv");
  c.features_path = defaulted(c.features_path, c.workdir, "feats.bin");
  c.model_path = defaulted(c.model_path, c.workdir, "model.bin");
  c.report_path = defaulted(c.report_path, c.workdir, "report.json");
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& j) {
  std::vector<std::string> errors;
  PipelineConfig c;
  if (!j.is_object()) {
    throw Error(Errc::kConfigError, "config must be a JSON object");
  }

  auto get_string = [&](const char* key, std::string fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) {
      errors.push_back(std::string(key) + ": expected string");
      return fallback;
    }
    return j[key].get<std::string>();
  };

  c.workdir = get_string("workdir", c.workdir.string());
  c.corpus_path = get_string("corpus", "");
  c.titles_path = get_string("title_embeddings", "");
  c.displays_path = get_string("display_embeddings", "");
  c.index_path = get_string("index", "");
  c.pools_path = get_string("pools", "");
  c.manifest_path = get_string("manifest", "");
  c.features_path = get_string("features", "");
  c.model_path = get_string("model", "");
  c.report_path = get_string("report", "");

  c.source = get_string("source", c.source);
  if (c.source != "synth" && c.source != "fhir") {
    errors.push_back("source: must be 'synth' or 'fhir'");
  }
  c.fhir_dir = get_string("fhir_dir", "");
  if (c.source == "fhir" && c.fhir_dir.empty()) {
    errors.push_back("fhir_dir: required when source is 'fhir'");
  }

  if (j.contains("synth")) {
    if (!j["synth"].is_object()) {
      errors.push_back("synth: expected object");
    } else {
      c.synth = synth_config_from_json(j["synth"]);
      if (c.synth.topic_count < 1) errors.push_back("synth.topic_count: must be >= 1");
      if (c.synth.sets_per_topic < 1) {
        errors.push_back("synth.sets_per_topic: must be >= 1");
      }
    }
  }

  c.k = j.value("k", c.k);
  if (c.k < 1) errors.push_back("k: must be >= 1");
  c.dim = j.value("dim", c.dim);
  if (c.dim < 8) errors.push_back("dim: must be >= 8");
  c.split_seed = j.value("split_seed", c.split_seed);

  if (j.contains("ratios")) {
    if (!j["ratios"].is_array() || j["ratios"].size() != 3) {
      errors.push_back("ratios: expected an array of 3 numbers");
    } else {
      for (int i = 0; i < 3; ++i) {
        c.ratios[static_cast<std::size_t>(i)] =
            j["ratios"][static_cast<std::size_t>(i)].get<double>();
      }
      const double sum = c.ratios[0] + c.ratios[1] + c.ratios[2];
      if (std::abs(sum - 1.0) > 1e-9) {
        errors.push_back("ratios: must sum to 1");
      }
    }
  }
  if (j.contains("holdout_publishers")) {
    if (!j["holdout_publishers"].is_array()) {
      errors.push_back("holdout_publishers: expected array of strings");
    } else {
      for (const auto& h : j["holdout_publishers"]) {
        c.holdout_publishers.push_back(h.get<std::string>());
      }
    }
  }
  c.publisher_bin_threshold =
      j.value("publisher_bin_threshold", c.publisher_bin_threshold);
  if (j.contains("train")) {
    if (!j["train"].is_object()) {
      errors.push_back("train: expected object");
    } else {
      c.train = train_config_from_json(j["train"]);
      if (c.train.batch_size < 2) errors.push_back("train.batch_size: must be >= 2");
      if (c.train.max_epochs < 1) errors.push_back("train.max_epochs: must be >= 1");
      if (c.train.learning_rate < 0) {
        errors.push_back("train.learning_rate: must be >= 0");
      }
    }
  }

  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) {
      if (!joined.empty()) joined += "; ";
      joined += e;
    }
    throw Error(Errc::kConfigError, joined);
  }
  apply_path_defaults(c);
  return c;
}

PipelineConfig validate_config(const std::filesystem::path& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw Error(Errc::kConfigError, path.string() + ": invalid JSON");
  }
  return pipeline_config_from_json(j);
}

json pipeline_config_to_json(const PipelineConfig& c) {
  return json{{"workdir", c.workdir.string()},
              {"corpus", c.corpus_path.string()},
              {"title_embeddings", c.titles_path.string()},
              {"display_embeddings", c.displays_path.string()},
              {"index", c.index_path.string()},
              {"pools", c.pools_path.string()},
              {"manifest", c.manifest_path.string()},
              {"features", c.features_path.string()},
              {"model", c.model_path.string()},
              {"report", c.report_path.string()},
              {"source", c.source},
              {"fhir_dir", c.fhir_dir.string()},
              {"synth", synth_config_to_json(c.synth)},
              {"k", c.k},
              {"dim", c.dim},
              {"split_seed", c.split_seed},
              {"ratios", c.ratios},
              {"holdout_publishers", c.holdout_publishers},
              {"publisher_bin_threshold", c.publisher_bin_threshold},
              {"train", train_config_to_json(c.train)}};
}

// ---------------------------------------------------------------------------
// Stages

void stage_ingest(const std::filesystem::path& fhir_dir,
                  const std::filesystem::path& out_corpus) {
  if (!std::filesystem::is_directory(fhir_dir)) {
    throw Error(Errc::kIoError, fhir_dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(fhir_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<ValueSet> sets;
  std::size_t skipped = 0;
  for (const auto& file : files) {
    try {
      sets.push_back(parse_fhir_valueset(read_text_file(file)));
    } catch (const Error& e) {
      // Missing expansions/titles are excluded, matching corpus filtering;
      // anything malformed aborts the stage.
      if (e.code() == Errc::kMissingExpansion ||
          e.code() == Errc::kMissingTitle) {
        log::warn(file.string() + ": " + e.what() + "; excluded");
        ++skipped;
        continue;
      }
      throw Error(e.code(), file.string() + ": " + e.what());
    }
  }
  const std::size_t before = sets.size();
  sets = filter_corpus(std::move(sets));
  log::info("ingest: " + std::to_string(sets.size()) + " value sets kept, " +
            std::to_string(before - sets.size() + skipped) + " excluded");
  write_corpus_jsonl(out_corpus, sets);
}

void stage_gen_synth(const SynthConfig& config,
                     const std::filesystem::path& out_corpus) {
  auto sets = generate_synthetic_corpus(config);
  write_corpus_jsonl(out_corpus, sets);
  log::info("gen-synth: " + std::to_string(sets.size()) + " value sets");
}

void stage_stats(const std::filesystem::path& corpus,
                 const std::filesystem::path& out_json) {
  const auto sets = read_corpus_jsonl(corpus);
  write_corpus_stats(out_json, corpus_stats(sets));
}

void stage_embed(const std::filesystem::path& corpus, EmbedField field,
                 const std::string& provider, Eigen::Index dim,
                 const std::optional<std::filesystem::path>& table_path,
                 const std::filesystem::path& out_table) {
  const auto sets = read_corpus_jsonl(corpus);
  std::vector<std::string> strings;
  if (field == EmbedField::kTitles || field == EmbedField::kBoth) {
    for (const auto& vs : sets) strings.push_back(vs.title);
  }
  if (field == EmbedField::kDisplays || field == EmbedField::kBoth) {
    for (const auto& vs : sets) {
      for (const auto& c : vs.codes) strings.push_back(display_key(c.display));
    }
  }

  EmbeddingTable table;
  if (provider == "hash") {
    HashEmbedder embedder(dim);
    table = embed_unique_strings(strings, embedder);
  } else if (provider == "file") {
    if (!table_path) {
      throw Error(Errc::kConfigError,
                  "provider 'file' requires an input table");
    }
    const EmbeddingTable source = load_embedding_table(*table_path);
    table = EmbeddingTable(source.dim());
    for (const auto& s : strings) {
      if (!table.contains(s)) {
        table.insert(s, source.at(s));  // throws MissingEmbedding
      }
    }
  } else {
    throw Error(Errc::kConfigError, "unknown provider '" + provider + "'");
  }
  save_embedding_table(out_table, table);
  log::info("embed: " + std::to_string(table.size()) + " unique strings");
}

void stage_index(const std::filesystem::path& corpus,
                 const std::filesystem::path& titles_table,
                 const std::filesystem::path& out_index) {
  const auto sets = read_corpus_jsonl(corpus);
  const auto titles = load_embedding_table(titles_table);
  std::vector<std::pair<std::string, std::string>> entries;
  entries.reserve(sets.size());
  for (const auto& vs : sets) entries.emplace_back(vs.oid, vs.title);
  save_index(out_index, build_index(titles, entries));
}

void stage_pool(const std::filesystem::path& corpus,
                const std::filesystem::path& index_path,
                const std::filesystem::path& titles_table, int k,
                const std::filesystem::path& out_pools) {
  const auto sets = read_corpus_jsonl(corpus);
  const auto index = load_index(index_path);
  const auto titles = load_embedding_table(titles_table);

  std::unordered_map<std::string, const ValueSet*> by_oid;
  for (const auto& vs : sets) by_oid.emplace(vs.oid, &vs);

  std::vector<CandidatePool> pools;
  pools.reserve(sets.size());
  for (const auto& vs : sets) {
    const auto hits = query_top_k(index, titles.at(vs.title), k, &vs.oid);
    std::vector<std::pair<const ValueSet*, double>> retrieved;
    retrieved.reserve(hits.size());
    for (const auto& hit : hits) {
      retrieved.emplace_back(by_oid.at(hit.oid), hit.similarity);
    }
    pools.push_back(build_candidate_pool(vs, retrieved));
  }
  write_pools_jsonl(out_pools, pools);
  log::info("pool: " + std::to_string(pools.size()) + " pools, positive rate " +
            format_double(pool_positive_rate(pools)));
}

void stage_split(const std::filesystem::path& corpus,
                 const std::filesystem::path& pools,
                 const std::vector<std::string>& holdout_publishers,
                 const std::array<double, 3>& ratios, std::uint64_t seed,
                 const std::filesystem::path& out_manifest) {
  const auto sets = read_corpus_jsonl(corpus);
  std::map<std::string, double> rr_by_oid;
  for (const auto& p : read_pools_jsonl(pools)) {
    rr_by_oid[p.target_oid] = p.rr_at_k;
  }
  write_manifest_csv(out_manifest, assign_splits(sets, holdout_publishers,
                                                 ratios, seed, rr_by_oid));
}

void stage_features(const std::filesystem::path& pools,
                    const std::filesystem::path& titles_table,
                    const std::filesystem::path& displays_table,
                    const std::filesystem::path& out_features) {
  const auto titles = load_embedding_table(titles_table);
  const auto displays = load_embedding_table(displays_table);
  const auto pool_list = read_pools_jsonl(pools);
  save_features(out_features,
                assemble_features(pool_list, titles, displays));
}

namespace {

std::unordered_map<std::string, Split> split_by_oid(
    const SplitManifest& manifest) {
  std::unordered_map<std::string, Split> out;
  for (const auto& row : manifest) out.emplace(row.oid, row.split);
  return out;
}

Eigen::VectorXd batched_probabilities(const MLPModel& model,
                                      const Eigen::Ref<const RowMatrixXd>& x,
                                      const std::vector<Eigen::Index>& rows) {
  constexpr Eigen::Index kBatch = 4096;
  Eigen::VectorXd probs(static_cast<Eigen::Index>(rows.size()));
  Eigen::Index done = 0;
  while (done < probs.size()) {
    const Eigen::Index take =
        std::min<Eigen::Index>(kBatch, probs.size() - done);
    RowMatrixXd xb(take, x.cols());
    for (Eigen::Index i = 0; i < take; ++i) {
      xb.row(i) = x.row(rows[static_cast<std::size_t>(done + i)]);
    }
    probs.segment(done, take) = forward_eval(model, xb);
    done += take;
  }
  return probs;
}

}  // namespace

void stage_train(const std::filesystem::path& features,
                 const std::filesystem::path& manifest,
                 const TrainConfig& config,
                 const std::filesystem::path& out_model) {
  const FeatureMatrix data = load_features(features);
  const auto splits = split_by_oid(read_manifest_csv(manifest));

  std::vector<Eigen::Index> train_rows, val_rows;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    auto it = splits.find(data.rows[i].oid);
    if (it == splits.end()) {
      throw Error(Errc::kMissingManifestRow, "oid " + data.rows[i].oid);
    }
    if (it->second == Split::kTrain) {
      train_rows.push_back(static_cast<Eigen::Index>(i));
    } else if (it->second == Split::kVal) {
      val_rows.push_back(static_cast<Eigen::Index>(i));
    }
  }

  const std::vector<Eigen::Index> dims = {data.x.cols(), 512, 256, 64, 1};
  MLPModel model = init_model(dims, config.seed);
  log::info("train: " + std::to_string(train_rows.size()) + " train rows, " +
            std::to_string(val_rows.size()) + " val rows, " +
            std::to_string(model.parameter_count()) + " parameters");

  TrainResult result = train(model, data.x, data.y, train_rows, val_rows,
                             config);

  // Decision threshold maximizing F1 on the validation split.
  Eigen::VectorXd val_probs =
      batched_probabilities(result.model, data.x, val_rows);
  Eigen::VectorXd val_labels(val_probs.size());
  for (std::size_t i = 0; i < val_rows.size(); ++i) {
    val_labels[static_cast<Eigen::Index>(i)] =
        data.y[val_rows[i]];
  }
  result.model.threshold = tune_threshold(val_probs, val_labels);

  json history = json::array();
  for (const auto& e : result.history) {
    history.push_back({{"epoch", e.epoch},
                       {"train_loss", e.train_loss},
                       {"val_loss", e.val_loss},
                       {"learning_rate", e.learning_rate}});
  }
  json echo = train_config_to_json(config);
  echo["positive_class_weight_used"] = result.positive_class_weight;
  echo["best_epoch"] = result.best_epoch;
  echo["best_val_loss"] = result.best_val_loss;
  echo["history"] = std::move(history);
  save_model(out_model, result.model, echo);
  log::info("train: best epoch " + std::to_string(result.best_epoch) +
            ", val loss " + format_double(result.best_val_loss) +
            ", threshold " + format_double(result.model.threshold));
}

json stage_eval(const std::filesystem::path& model_path,
                const std::filesystem::path& features,
                const std::filesystem::path& pools,
                const std::filesystem::path& manifest,
                std::size_t publisher_bin_threshold,
                const std::filesystem::path& out_report) {
  const MLPModel model = load_model(model_path);
  const FeatureMatrix data = load_features(features);
  const auto pool_list = read_pools_jsonl(pools);
  const SplitManifest manifest_rows = read_manifest_csv(manifest);
  const auto splits = split_by_oid(manifest_rows);

  // Feature rows are contiguous per pool, in pools-file order.
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> spans;
  {
    std::size_t row = 0;
    for (const auto& p : pool_list) {
      spans.emplace(p.target_oid, std::make_pair(row, p.entries.size()));
      row += p.entries.size();
    }
    if (row != data.rows.size()) {
      throw Error(Errc::kShapeMismatch,
                  "features file does not match pools file");
    }
  }

  std::vector<const CandidatePool*> test_pools;
  std::vector<Eigen::Index> test_rows;
  for (const auto& p : pool_list) {
    auto it = splits.find(p.target_oid);
    if (it == splits.end()) {
      throw Error(Errc::kMissingManifestRow, "oid " + p.target_oid);
    }
    if (it->second != Split::kTest) continue;
    test_pools.push_back(&p);
    const auto [start, count] = spans.at(p.target_oid);
    for (std::size_t i = 0; i < count; ++i) {
      test_rows.push_back(static_cast<Eigen::Index>(start + i));
    }
  }
  if (test_pools.empty()) {
    throw Error(Errc::kEmptySplit, "no test value sets in manifest");
  }

  const Eigen::VectorXd probs =
      batched_probabilities(model, data.x, test_rows);
  std::vector<double> scores(static_cast<std::size_t>(probs.size()));
  std::vector<int> labels(scores.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = probs[static_cast<Eigen::Index>(i)];
    labels[i] = data.y[test_rows[i]] > 0.5 ? 1 : 0;
    positives += static_cast<std::size_t>(labels[i]);
  }

  // Per-set decisions at the stored threshold.
  std::vector<std::pair<std::string, Prf>> classifier_per_set;
  std::vector<Prf> classifier_prfs, baseline_prfs;
  std::vector<Prf> classifier_rr1, baseline_rr1;
  double rr_sum = 0.0;
  {
    std::size_t cursor = 0;
    for (const CandidatePool* p : test_pools) {
      const std::size_t count = p->entries.size();
      std::vector<char> decisions(count);
      for (std::size_t i = 0; i < count; ++i) {
        decisions[i] =
            scores[cursor + i] >= model.threshold ? 1 : 0;
      }
      cursor += count;
      const Prf prf = pool_decision_prf(*p, decisions);
      classifier_per_set.emplace_back(p->target_oid, prf);
      classifier_prfs.push_back(prf);
      const std::vector<char> all_positive(count, 1);
      const Prf base = pool_decision_prf(*p, all_positive);
      baseline_prfs.push_back(base);
      rr_sum += p->rr_at_k;
      if (p->rr_at_k == 1.0) {
        classifier_rr1.push_back(prf);
        baseline_rr1.push_back(base);
      }
    }
  }

  std::unordered_map<std::string, std::size_t> truth_sizes;
  for (const CandidatePool* p : test_pools) {
    truth_sizes.emplace(p->target_oid, p->target_size);
  }

  const StratifiedReport strata = stratified_report(
      classifier_per_set, manifest_rows, truth_sizes, publisher_bin_threshold);

  std::vector<CandidatePool> test_pool_values;
  test_pool_values.reserve(test_pools.size());
  for (const auto* p : test_pools) test_pool_values.push_back(*p);

  json report{
      {"split", "test"},
      {"n_value_sets", test_pools.size()},
      {"threshold", model.threshold},
      {"mean_rr_at_k", rr_sum / static_cast<double>(test_pools.size())},
      {"pair_level",
       {{"auroc", auroc(scores, labels)},
        {"average_precision", average_precision(scores, labels)},
        {"n_pairs", scores.size()},
        {"positive_rate", pool_positive_rate(test_pool_values)}}},
      {"value_set_level",
       {{"classifier", macro_block_to_json(macro_aggregate(classifier_prfs))},
        {"retrieval_only",
         macro_block_to_json(macro_aggregate(baseline_prfs))}}},
      {"strata", stratified_report_to_json(strata)}};
  if (!classifier_rr1.empty()) {
    report["rr1_precision"] = {
        {"classifier", macro_aggregate(classifier_rr1).precision},
        {"retrieval_only", macro_aggregate(baseline_rr1).precision},
        {"n", classifier_rr1.size()}};
  }

  write_file_atomic(out_report, report.dump(2) + "\n");
  write_strata_csv(out_report, strata);
  return report;
}

json stage_eval_predictions(const std::filesystem::path& predictions,
                            const std::filesystem::path& corpus,
                            const std::filesystem::path& manifest,
                            std::size_t publisher_bin_threshold,
                            const std::filesystem::path& out_report) {
  const auto sets = read_corpus_jsonl(corpus);
  const SplitManifest manifest_rows = read_manifest_csv(manifest);

  std::unordered_map<std::string, const ValueSet*> by_oid;
  for (const auto& vs : sets) by_oid.emplace(vs.oid, &vs);

  std::vector<std::string> test_oids;
  for (const auto& row : manifest_rows) {
    if (row.split == Split::kTest) test_oids.push_back(row.oid);
  }
  if (test_oids.empty()) {
    throw Error(Errc::kEmptySplit, "no test value sets in manifest");
  }

  const auto preds = read_predictions_jsonl(predictions);
  const auto universe = build_universe(sets);
  const ExternalScore score =
      score_external_predictions(preds, by_oid, universe, test_oids);

  std::vector<Prf> prfs;
  std::vector<std::pair<std::string, Prf>> known_per_set;
  std::unordered_map<std::string, std::size_t> truth_sizes;
  for (const auto& [oid, prf] : score.per_set) {
    prfs.push_back(prf);
    auto vs = by_oid.find(oid);
    if (vs != by_oid.end()) {
      known_per_set.emplace_back(oid, prf);
      truth_sizes.emplace(oid, vs->second->codes.size());
    }
  }

  const StratifiedReport strata = stratified_report(
      known_per_set, manifest_rows, truth_sizes, publisher_bin_threshold);

  json report{{"split", "test"},
              {"n_value_sets", score.per_set.size()},
              {"value_set_level",
               {{"generator", macro_block_to_json(macro_aggregate(prfs))}}},
              {"hallucination_rate", score.hallucination_rate},
              {"total_predicted_pairs", score.total_predicted},
              {"hallucinated_pairs", score.hallucinated},
              {"strata", stratified_report_to_json(strata)}};
  if (strata.rr1.n > 0) {
    report["rr1_precision"] = {{"generator", strata.rr1.precision},
                               {"n", strata.rr1.n}};
  }
  write_file_atomic(out_report, report.dump(2) + "\n");
  write_strata_csv(out_report, strata);
  return report;
}

// ---------------------------------------------------------------------------
// run_all with content-hash staleness

namespace {

class StageCache {
 public:
  explicit StageCache(const std::filesystem::path& file) : file_(file) {
    if (std::filesystem::exists(file_)) {
      data_ = json::parse(read_text_file(file_), nullptr, false);
      if (data_.is_discarded() || !data_.is_object()) data_ = json::object();
    } else {
      data_ = json::object();
    }
  }

  bool fresh(const std::string& stage, const std::string& inputs_hash,
             const std::vector<std::filesystem::path>& outputs) const {
    if (!data_.contains(stage)) return false;
    if (data_[stage].value("inputs", std::string()) != inputs_hash) {
      return false;
    }
    for (const auto& out : outputs) {
      if (!std::filesystem::exists(out)) return false;
    }
    return true;
  }

  void record(const std::string& stage, const std::string& inputs_hash) {
    data_[stage] = json{{"inputs", inputs_hash}};
  }

  void flush() { write_file_atomic(file_, data_.dump(2) + "\n"); }

 private:
  std::filesystem::path file_;
  json data_;
};

std::string hash_inputs(const std::vector<std::filesystem::path>& files,
                        const std::string& config_fragment) {
  std::string acc = config_fragment;
  for (const auto& f : files) {
    acc += "|";
    acc += f.string();
    acc += ":";
    acc += sha256_file_hex(f);
  }
  return sha256_hex(acc);
}

}  // namespace

json run_all(const PipelineConfig& config, bool force) {
  std::filesystem::create_directories(config.workdir);
  StageCache cache(config.workdir / ".vset_cache.json");
  std::vector<std::string> ran;
  bool upstream_ran = false;

  auto run_stage = [&](const std::string& name,
                       const std::vector<std::filesystem::path>& inputs,
                       const std::string& config_fragment,
                       const std::vector<std::filesystem::path>& outputs,
                       const std::function<void()>& body) {
    const std::string inputs_hash = hash_inputs(inputs, config_fragment);
    if (!force && !upstream_ran && cache.fresh(name, inputs_hash, outputs)) {
      log::info(name + ": up to date, skipped");
      return;
    }
    log::info(name + ": running");
    try {
      body();
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + name + ": " + e.what());
    }
    cache.record(name, hash_inputs(inputs, config_fragment));
    upstream_ran = true;
    ran.push_back(name);
  };

  // 1. corpus
  if (config.source == "synth") {
    run_stage("gen-synth", {}, synth_config_to_json(config.synth).dump(),
              {config.corpus_path},
              [&] { stage_gen_synth(config.synth, config.corpus_path); });
  } else {
    run_stage("ingest", {}, config.fhir_dir.string(), {config.corpus_path},
              [&] { stage_ingest(config.fhir_dir, config.corpus_path); });
  }

  // 2-3. embeddings
  run_stage("embed-titles", {config.corpus_path},
            "titles|hash|" + std::to_string(config.dim),
            {config.titles_path}, [&] {
              stage_embed(config.corpus_path, EmbedField::kTitles, "hash",
                          config.dim, std::nullopt, config.titles_path);
            });
  run_stage("embed-displays", {config.corpus_path},
            "displays|hash|" + std::to_string(config.dim),
            {config.displays_path}, [&] {
              stage_embed(config.corpus_path, EmbedField::kDisplays, "hash",
                          config.dim, std::nullopt, config.displays_path);
            });

  // 4. index
  run_stage("index", {config.corpus_path, config.titles_path}, "",
            {config.index_path}, [&] {
              stage_index(config.corpus_path, config.titles_path,
                          config.index_path);
            });

  // 5. pools
  run_stage("pool",
            {config.corpus_path, config.index_path, config.titles_path},
            "k=" + std::to_string(config.k), {config.pools_path}, [&] {
              stage_pool(config.corpus_path, config.index_path,
                         config.titles_path, config.k, config.pools_path);
            });

  // 6. split
  {
    json frag{{"holdout", config.holdout_publishers},
              {"ratios", config.ratios},
              {"seed", config.split_seed}};
    run_stage("split", {config.corpus_path, config.pools_path}, frag.dump(),
              {config.manifest_path}, [&] {
                stage_split(config.corpus_path, config.pools_path,
                            config.holdout_publishers, config.ratios,
                            config.split_seed, config.manifest_path);
              });
  }

  // 7. features
  run_stage("features",
            {config.pools_path, config.titles_path, config.displays_path},
            "", {config.features_path}, [&] {
              stage_features(config.pools_path, config.titles_path,
                             config.displays_path, config.features_path);
            });

  // 8. train
  run_stage("train", {config.features_path, config.manifest_path},
            train_config_to_json(config.train).dump(), {config.model_path},
            [&] {
              stage_train(config.features_path, config.manifest_path,
                          config.train, config.model_path);
            });

  // 9. eval
  json report;
  run_stage("eval",
            {config.model_path, config.features_path, config.pools_path,
             config.manifest_path},
            "bin_threshold=" + std::to_string(config.publisher_bin_threshold),
            {config.report_path}, [&] {
              report = stage_eval(config.model_path, config.features_path,
                                  config.pools_path, config.manifest_path,
                                  config.publisher_bin_threshold,
                                  config.report_path);
            });
  if (report.is_null()) {
    report = json::parse(read_text_file(config.report_path));
  }

  cache.flush();
  return json{{"stages_run", ran},
              {"report_path", config.report_path.string()},
              {"report", std::move(report)}};
}

}  // namespace vset

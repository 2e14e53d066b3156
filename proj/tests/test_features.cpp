// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "vset/error.hpp"
#include "vset/features.hpp"

using namespace vset;

namespace {

EmbeddingTable hash_table(const std::vector<std::string>& strings,
                          Eigen::Index dim) {
  HashEmbedder provider(dim);
  return embed_unique_strings(strings, provider);
}

CandidatePool sample_pool() {
  CandidatePool pool;
  pool.target_oid = "1.2.3";
  pool.target_title = "asthma codes";
  pool.target_size = 3;
  pool.rr_at_k = 2.0 / 3.0;
  pool.entries.push_back(
      {"100", "SNOMED-CT", "asthma mild", 0.9, "src1", 1});
  pool.entries.push_back({"200", "ATC", "asthma drug", 0.5, "src2", 0});
  pool.entries.push_back({"300", "RxNorm", "", 0.7, "src1", 1});
  return pool;
}

}  // namespace

TEST_CASE("one_hot_system slot order") {
  auto v = one_hot_system("SNOMED-CT");
  CHECK(v[0] == 1.0);
  CHECK(v.sum() == 1.0);
  v = one_hot_system("RxNorm");
  CHECK(v[2] == 1.0);
  v = one_hot_system("HCPCS");
  CHECK(v[6] == 1.0);
  v = one_hot_system("ATC");  // unlisted -> OTHER
  CHECK(v[7] == 1.0);
  CHECK(one_hot_system("").sum() == 1.0);
}

TEST_CASE("feature layout at small d") {
  const Eigen::Index d = 8;
  const auto pool = sample_pool();
  const auto titles = hash_table({pool.target_title}, d);
  const auto displays =
      hash_table({"asthma mild", "asthma drug", "<EMPTY>"}, d);

  const auto fm = assemble_pool_features(pool, pool.target_title, titles,
                                         displays);
  CHECK(fm.x.cols() == 2 * d + 9);
  CHECK(fm.x.rows() == 3);
  CHECK(fm.y.size() == 3);

  // Title block identical across rows.
  CHECK(fm.x.row(0).segment(0, d) == fm.x.row(1).segment(0, d));
  CHECK(fm.x.row(0).segment(0, d) == fm.x.row(2).segment(0, d));

  // Display block matches the table entry.
  const auto want = displays.at("asthma drug");
  for (Eigen::Index i = 0; i < d; ++i) {
    CHECK(fm.x(1, d + i) == want[i]);
  }

  // One-hot block and similarity slot.
  CHECK(fm.x(1, 2 * d + 7) == 1.0);  // ATC -> OTHER
  CHECK(fm.x.row(1).segment(2 * d, 8).sum() == 1.0);
  CHECK(fm.x(0, 2 * d + 8) == 0.9);
  CHECK(fm.x(1, 2 * d + 8) == 0.5);

  // Labels follow the pool.
  CHECK(fm.y[0] == 1.0);
  CHECK(fm.y[1] == 0.0);

  // Row map carries provenance.
  CHECK(fm.rows[2].oid == "1.2.3");
  CHECK(fm.rows[2].code == "300");
}

TEST_CASE("empty display uses the sentinel embedding") {
  const Eigen::Index d = 8;
  const auto pool = sample_pool();
  const auto titles = hash_table({pool.target_title}, d);
  const auto displays =
      hash_table({"asthma mild", "asthma drug", "<EMPTY>"}, d);
  const auto fm =
      assemble_pool_features(pool, pool.target_title, titles, displays);
  const auto sentinel = displays.at("<EMPTY>");
  for (Eigen::Index i = 0; i < d; ++i) {
    CHECK(fm.x(2, d + i) == sentinel[i]);
  }
}

TEST_CASE("feature length is 1545 at d=768") {
  FeatureMatrix fm;
  fm.embedding_dim = 768;
  CHECK(fm.cols() == 1545);
  // And the general 2d+9 invariant.
  for (Eigen::Index d : {8, 16, 100}) {
    fm.embedding_dim = d;
    CHECK(fm.cols() == 2 * d + 9);
  }
}

TEST_CASE("missing embedding is a hard error") {
  const auto pool = sample_pool();
  const auto titles = hash_table({pool.target_title}, 8);
  const auto displays = hash_table({"asthma mild"}, 8);  // others missing
  CHECK_THROWS_AS((void)assemble_pool_features(pool, pool.target_title,
                                               titles, displays),
                  Error);
}

TEST_CASE("assembly is pure: same inputs give identical matrices") {
  const auto pool = sample_pool();
  const auto titles = hash_table({pool.target_title}, 8);
  const auto displays =
      hash_table({"asthma mild", "asthma drug", "<EMPTY>"}, 8);
  const auto a =
      assemble_pool_features(pool, pool.target_title, titles, displays);
  const auto b =
      assemble_pool_features(pool, pool.target_title, titles, displays);
  CHECK((a.x - b.x).norm() == 0.0);
  CHECK(a.y == b.y);
}

TEST_CASE("features artifact round trip") {
  const auto pool = sample_pool();
  const auto titles = hash_table({pool.target_title}, 8);
  const auto displays =
      hash_table({"asthma mild", "asthma drug", "<EMPTY>"}, 8);
  auto fm = assemble_features({pool}, titles, displays);

  const auto path =
      std::filesystem::temp_directory_path() / "vset_feats_rt.bin";
  save_features(path, fm);
  const auto back = load_features(path);
  CHECK(back.embedding_dim == fm.embedding_dim);
  CHECK((back.x - fm.x).norm() == 0.0);
  CHECK(back.y == fm.y);
  REQUIRE(back.rows.size() == fm.rows.size());
  for (std::size_t i = 0; i < fm.rows.size(); ++i) {
    CHECK(back.rows[i].oid == fm.rows[i].oid);
    CHECK(back.rows[i].code == fm.rows[i].code);
    CHECK(back.rows[i].system == fm.rows[i].system);
  }
}

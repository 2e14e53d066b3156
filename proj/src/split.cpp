// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/split.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "vset/error.hpp"
#include "vset/io_util.hpp"
#include "vset/rng.hpp"

namespace vset {

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw Error(Errc::kBadRecord, "unknown split: " + s);
}

std::string publisher_bin(const std::string& publisher,
                          const std::map<std::string, std::size_t>& counts,
                          std::size_t threshold) {
  auto it = counts.find(publisher);
  if (it != counts.end() && it->second >= threshold) {
    return publisher;
  }
  return "OTHER";
}

SplitManifest assign_splits(const std::vector<ValueSet>& sets,
                            const std::vector<std::string>& held_out_publishers,
                            std::array<double, 3> ratios, std::uint64_t seed,
                            const std::map<std::string, double>& rr_by_oid) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9 || ratios[0] < 0 || ratios[1] < 0 ||
      ratios[2] < 0) {
    throw Error(Errc::kInvalidRatios, "ratios must be nonnegative and sum to 1");
  }

  const std::unordered_set<std::string> held(held_out_publishers.begin(),
                                             held_out_publishers.end());

  // Publisher counts over the non-held-out corpus drive the binning.
  std::map<std::string, std::size_t> counts;
  for (const auto& vs : sets) {
    if (!held.count(vs.publisher)) ++counts[vs.publisher];
  }

  std::unordered_map<std::string, Split> assignment;
  assignment.reserve(sets.size());

  // Strata keyed by (vs_type, publisher_bin); std::map iteration gives a
  // deterministic processing order.
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>>
      strata;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& vs = sets[i];
    if (held.count(vs.publisher)) {
      assignment[vs.oid] = Split::kTest;
      continue;
    }
    strata[{to_string(vs.vs_type), publisher_bin(vs.publisher, counts)}]
        .push_back(i);
  }

  Rng rng(seed);
  for (auto& [key, members] : strata) {
    if (members.size() < 3) {
      for (std::size_t i : members) assignment[sets[i].oid] = Split::kTrain;
      continue;
    }
    rng.shuffle(members);

    const double n = static_cast<double>(members.size());
    std::array<double, 3> exact = {n * ratios[0], n * ratios[1],
                                   n * ratios[2]};
    std::array<std::size_t, 3> take = {
        static_cast<std::size_t>(std::floor(exact[0])),
        static_cast<std::size_t>(std::floor(exact[1])),
        static_cast<std::size_t>(std::floor(exact[2]))};
    std::size_t assigned = take[0] + take[1] + take[2];
    // Largest remainder; ties resolved in fixed order train > val > test.
    while (assigned < members.size()) {
      int best = 0;
      double best_rem = -1.0;
      for (int j = 0; j < 3; ++j) {
        const double rem = exact[j] - static_cast<double>(take[j]);
        if (rem > best_rem + 1e-12) {
          best_rem = rem;
          best = j;
        }
      }
      ++take[static_cast<std::size_t>(best)];
      exact[static_cast<std::size_t>(best)] -= 1.0;  // consume the remainder
      ++assigned;
    }

    std::size_t p = 0;
    for (std::size_t j = 0; j < take[0]; ++j)
      assignment[sets[members[p++]].oid] = Split::kTrain;
    for (std::size_t j = 0; j < take[1]; ++j)
      assignment[sets[members[p++]].oid] = Split::kVal;
    for (std::size_t j = 0; j < take[2]; ++j)
      assignment[sets[members[p++]].oid] = Split::kTest;
  }

  SplitManifest manifest;
  manifest.reserve(sets.size());
  for (const auto& vs : sets) {
    auto rr = rr_by_oid.find(vs.oid);
    if (rr == rr_by_oid.end()) {
      throw Error(Errc::kBadRecord,
                  "no rr_at_k for oid " + vs.oid + " (missing pool?)");
    }
    manifest.push_back({vs.oid, assignment.at(vs.oid), rr->second, vs.vs_type,
                        vs.publisher});
  }
  return manifest;
}

void write_manifest_csv(const std::filesystem::path& path,
                        const SplitManifest& manifest) {
  std::string out = "oid,split,rr_at_k,vs_type,publisher\n";
  for (const auto& row : manifest) {
    out += csv_escape(row.oid) + "," + to_string(row.split) + "," +
           format_double(row.rr_at_k) + "," +
           csv_escape(to_string(row.vs_type)) + "," +
           csv_escape(row.publisher) + "\n";
  }
  write_file_atomic(path, out);
}

SplitManifest read_manifest_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "oid,split,rr_at_k,vs_type,publisher") {
    throw Error(Errc::kBadHeader, path.string() + ": bad manifest header");
  }
  SplitManifest manifest;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = csv_split_line(lines[i]);
    if (fields.size() != 5) {
      throw Error(Errc::kBadRecord, path.string() + " line " +
                                        std::to_string(i + 1) +
                                        ": expected 5 fields");
    }
    manifest.push_back({fields[0], split_from_string(fields[1]),
                        std::stod(fields[2]), vs_type_from_string(fields[3]),
                        fields[4]});
  }
  return manifest;
}

}  // namespace vset

// Copyright 2026 The revrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVREC_PERSISTENCE_HPP_
#define REVREC_PERSISTENCE_HPP_

#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "revrec/errors.hpp"
#include "revrec/evaluation.hpp"
#include "revrec/lda.hpp"
#include "revrec/profiles.hpp"
#include "revrec/random.hpp"
#include "revrec/recommender.hpp"

namespace revrec {

// --- profiles: one JSON object per line --------------------------------------

inline nlohmann::ordered_json to_json(const PreferenceProfile& p) {
  nlohmann::ordered_json j;
  j["entity_kind"] = to_string(p.kind);
  j["entity_id"] = p.entity_id;
  j["theta"] = p.theta;
  j["support"] = p.support;
  j["provenance"] = to_string(p.provenance);
  return j;
}

inline PreferenceProfile profile_from_json(const nlohmann::json& j) {
  PreferenceProfile p;
  const auto kind = j.at("entity_kind").get<std::string>();
  if (kind == "user") p.kind = EntityKind::user;
  else if (kind == "movie") p.kind = EntityKind::movie;
  else throw FormatError("unknown entity_kind '" + kind + "'");
  p.entity_id = j.at("entity_id").get<std::string>();
  p.theta = j.at("theta").get<std::vector<double>>();
  p.support = j.at("support").get<std::uint32_t>();
  p.provenance = parse_provenance(j.at("provenance").get<std::string>());
  if (!is_distribution(p.theta, 1e-6))
    throw FormatError("profile '" + p.entity_id + "' theta is not a distribution");
  return p;
}

inline void write_profiles(std::ostream& out, std::span<const PreferenceProfile> profiles) {
  for (const auto& p : profiles) out << to_json(p).dump() << '\n';
}

inline std::vector<PreferenceProfile> read_profiles(std::istream& in) {
  std::vector<PreferenceProfile> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(profile_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("profiles line " + std::to_string(n) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("I/O error while reading profiles");
  return out;
}

// --- ranked list ----------------------------------------------------------

inline nlohmann::ordered_json to_json(const RankedList& list) {
  nlohmann::ordered_json j;
  j["user_id"] = list.user_id;
  j["metric"] = to_string(list.metric);
  j["k"] = list.k;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : list.entries) {
    nlohmann::ordered_json entry;
    entry["movie_id"] = e.movie_id;
    entry["score"] = e.score;
    j["entries"].push_back(std::move(entry));
  }
  return j;
}

// --- evaluation report ------------------------------------------------------

inline nlohmann::ordered_json to_json(const StratumStats& s, const std::vector<std::size_t>& cutoffs) {
  nlohmann::ordered_json j;
  j["trials"] = s.trials;
  nlohmann::ordered_json hit, base;
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    hit[std::to_string(cutoffs[c])] = s.hit_rate(c);
    base[std::to_string(cutoffs[c])] = s.random_baseline(c);
  }
  j["hit_rate"] = hit;
  j["mrr"] = s.mrr();
  j["random_baseline"] = base;
  return j;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  const auto& cfg = r.config;
  nlohmann::ordered_json j;
  nlohmann::ordered_json c;
  c["n_test_users"] = cfg.n_test_users;
  c["positive_rating_min"] = cfg.positive_rating_min;
  c["completeness_levels"] = cfg.completeness_levels;
  c["cutoffs"] = cfg.cutoffs;
  c["metric"] = to_string(cfg.recommend.metric);
  c["kl_direction"] = to_string(cfg.recommend.kl_direction);
  c["scoring"] = cfg.scoring == Scoring::model ? "model" : "random";
  c["targets_per_user"] = cfg.targets_per_user;
  c["seed"] = cfg.seed;
  j["config"] = c;
  j["users_requested"] = r.users_requested;
  j["qualifying_users"] = r.qualifying_users;
  j["users_evaluated"] = r.users_evaluated;
  j["unrankable_trials"] = r.unrankable_trials;
  j["leakage_violations"] = r.leakage_violations;
  j["levels"] = nlohmann::ordered_json::array();
  for (const auto& lr : r.levels) {
    nlohmann::ordered_json l;
    l["completeness"] = lr.completeness;
    l["all"] = to_json(lr.all, cfg.cutoffs);
    l["warm"] = to_json(lr.warm, cfg.cutoffs);
    l["cold"] = to_json(lr.cold, cfg.cutoffs);
    j["levels"].push_back(std::move(l));
  }
  return j;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Rows are completeness levels, columns the K cutoffs (hit rate, all trials).
inline void write_report_csv(std::ostream& out, const EvalReport& r) {
  out << "completeness";
  for (auto k : r.config.cutoffs) out << ",hit@" << k;
  out << '\n';
  for (const auto& lr : r.levels) {
    out << format_number(lr.completeness);
    for (std::size_t c = 0; c < r.config.cutoffs.size(); ++c)
      out << ',' << format_number(lr.all.hit_rate(c));
    out << '\n';
  }
}

inline void write_rank_histogram_tsv(std::ostream& out, const EvalReport& r) {
  out << "completeness\trank\tcount\n";
  for (const auto& lr : r.levels)
    for (const auto& [rank, count] : lr.rank_histogram)
      out << format_number(lr.completeness) << '\t' << rank << '\t' << count << '\n';
}

// --- files -------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string file_checksum(const std::string& path) {
  return detail::hex64(fnv1a64(read_file(path)));
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << bytes;
  if (!out) throw IoError("failed writing " + path);
}

// Sidecar "<output>.provenance.json": resolved configuration and FNV-1a
// checksums of every input, no timestamps, so reruns are byte-identical.
inline void write_provenance(const std::string& output_path, const std::string& command,
                             const nlohmann::ordered_json& resolved_config,
                             const std::vector<std::string>& inputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["output"] = output_path;
  j["config"] = resolved_config;
  nlohmann::ordered_json sums = nlohmann::ordered_json::object();
  for (const auto& in : inputs)
    if (!in.empty()) sums[in] = file_checksum(in);
  j["inputs"] = sums;
  write_file(output_path + ".provenance.json", j.dump(2) + "\n");
}

}  // namespace revrec

#endif  // REVREC_PERSISTENCE_HPP_

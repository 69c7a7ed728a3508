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

#ifndef REVREC_RECOMMENDER_HPP_
#define REVREC_RECOMMENDER_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "revrec/errors.hpp"
#include "revrec/metrics.hpp"
#include "revrec/profiles.hpp"

namespace revrec {

enum class Metric { kl, cosine };

// Which way KL is taken. user_to_movie scores KL(user || movie) and so
// penalizes movies that lack mass on the user's preferred features.
enum class KlDirection { user_to_movie, movie_to_user, jensen_shannon };

inline const char* to_string(Metric m) { return m == Metric::kl ? "kl" : "cosine"; }

inline Metric parse_metric(std::string_view s) {
  if (s == "kl") return Metric::kl;
  if (s == "cosine") return Metric::cosine;
  throw ConfigError("unknown metric '" + std::string(s) + "' (expected kl or cosine)");
}

inline const char* to_string(KlDirection d) {
  switch (d) {
    case KlDirection::user_to_movie: return "user_movie";
    case KlDirection::movie_to_user: return "movie_user";
    case KlDirection::jensen_shannon: return "js";
  }
  return "?";
}

inline KlDirection parse_kl_direction(std::string_view s) {
  if (s == "user_movie") return KlDirection::user_to_movie;
  if (s == "movie_user") return KlDirection::movie_to_user;
  if (s == "js") return KlDirection::jensen_shannon;
  throw ConfigError("unknown KL direction '" + std::string(s) +
                    "' (expected user_movie, movie_user or js)");
}

struct RecommendOptions {
  Metric metric = Metric::kl;
  KlDirection kl_direction = KlDirection::user_to_movie;
};

struct ScoredMovie {
  std::string movie_id;
  double score;
};

struct RankedList {
  std::string user_id;
  Metric metric = Metric::kl;
  std::size_t k = 0;
  // kl: ascending (smaller is closer); cosine: descending.
  std::vector<ScoredMovie> entries;
};

inline double score(const TopicDistribution& user, const TopicDistribution& movie,
                    const RecommendOptions& opts) {
  if (opts.metric == Metric::cosine) return cosine_similarity(user, movie);
  switch (opts.kl_direction) {
    case KlDirection::user_to_movie: return kl_divergence(user, movie);
    case KlDirection::movie_to_user: return kl_divergence(movie, user);
    case KlDirection::jensen_shannon: return jensen_shannon(user, movie);
  }
  return 0.0;
}

// Strict ranking order: better score first, then movie_id.
inline bool ranks_before(const ScoredMovie& a, const ScoredMovie& b, Metric metric) {
  if (a.score != b.score) return metric == Metric::kl ? a.score < b.score : a.score > b.score;
  return a.movie_id < b.movie_id;
}

/// Scores every non-excluded candidate against the user and keeps the best
/// K. Throws NothingToRecommend when exclusions leave no candidate.
inline RankedList recommend_top_k(const PreferenceProfile& user,
                                  std::span<const PreferenceProfile> candidates, std::size_t k,
                                  const RecommendOptions& opts,
                                  const std::unordered_set<std::string>& exclusions = {}) {
  if (k < 1) throw ArgumentError("K must be >= 1");
  RankedList list{user.entity_id, opts.metric, k, {}};
  std::unordered_set<std::string_view> seen;
  list.entries.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (!seen.insert(c.entity_id).second)
      throw ArgumentError("duplicate candidate movie '" + c.entity_id + "'");
    if (exclusions.count(c.entity_id)) continue;
    if (c.theta.size() != user.theta.size())
      throw ArgumentError("candidate '" + c.entity_id + "' has a different topic count");
    list.entries.push_back({c.entity_id, score(user.theta, c.theta, opts)});
  }
  if (list.entries.empty())
    throw NothingToRecommend("nothing to recommend for '" + user.entity_id + "'");
  const auto keep = std::min(k, list.entries.size());
  std::partial_sort(list.entries.begin(), list.entries.begin() + static_cast<std::ptrdiff_t>(keep),
                    list.entries.end(), [&](const ScoredMovie& a, const ScoredMovie& b) {
                      return ranks_before(a, b, opts.metric);
                    });
  list.entries.resize(keep);
  return list;
}

}  // namespace revrec

#endif  // REVREC_RECOMMENDER_HPP_

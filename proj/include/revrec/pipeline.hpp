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

#ifndef REVREC_PIPELINE_HPP_
#define REVREC_PIPELINE_HPP_

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "revrec/coldstart.hpp"
#include "revrec/corpus.hpp"
#include "revrec/errors.hpp"
#include "revrec/lda.hpp"
#include "revrec/parallel.hpp"
#include "revrec/profiles.hpp"
#include "revrec/random.hpp"
#include "revrec/text.hpp"

namespace revrec {

// Auxiliary documents per movie, already mapped to vocabulary ids, in
// input order.
using AuxIndex = std::map<std::string, std::vector<std::vector<WordId>>>;

inline AuxIndex index_aux(std::span<const AuxDocument> aux, const Vocabulary& vocab,
                          const Preprocessor& pre) {
  AuxIndex index;
  for (const auto& a : aux) index[a.movie_id].push_back(to_ids(pre(a.text), vocab));
  return index;
}

struct ProfileSettings {
  ProfileOptions profile;
  ColdPolicy cold;
  std::size_t cf_k = 20;
  std::uint32_t aux_weight = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

inline std::uint64_t user_seed(std::uint64_t seed, const std::string& id) {
  return derive_seed(seed, "user", id);
}

inline std::uint64_t movie_seed(std::uint64_t seed, const std::string& id) {
  return derive_seed(seed, "movie", id);
}

/// Profile for one movie: inferred from reviews when warm, enriched with
/// auxiliary text when cold. Throws UnrecommendableMovie when neither
/// source has a usable token.
inline PreferenceProfile movie_profile(const std::string& movie_id,
                                       std::span<const ReviewRef> reviews, const AuxIndex& aux,
                                       const TopicModel& model, const ProfileSettings& s) {
  const auto seed = movie_seed(s.seed, movie_id);
  if (classify_cold(EntityKind::movie, entity_counts(reviews), s.cold) == Warmth::warm) {
    try {
      return build_movie_profile(movie_id, reviews, model, s.profile, seed);
    } catch (const ColdMovie&) {
      // Enough reviews but no usable tokens: fall through to enrichment.
    }
  }
  static const std::vector<std::vector<WordId>> kNone;
  auto it = aux.find(movie_id);
  const auto& docs = it == aux.end() ? kNone : it->second;
  return enrich_movie_profile(movie_id, reviews, docs, model, {s.profile.inference, s.aux_weight},
                              seed);
}

struct ProfileSet {
  std::vector<PreferenceProfile> users;   // warm (inferred) then cold (cf_filled), id order
  std::vector<PreferenceProfile> movies;  // id order
  std::vector<std::string> unrecommendable_movies;
  std::size_t warm_users = 0;
  std::size_t cf_fallbacks = 0;
};

/// Builds a profile for every user and every movie in the dataset (plus
/// movies known only from auxiliary text).
inline ProfileSet build_all_profiles(const Dataset& ds, const AuxIndex& aux,
                                     const TopicModel& model, const ProfileSettings& s) {
  s.cold.validate();
  ProfileSet out;

  std::vector<std::string> user_ids;
  for (const auto& [id, _] : ds.by_user) user_ids.push_back(id);
  std::vector<std::optional<PreferenceProfile>> seeds(user_ids.size());
  std::vector<char> warm(user_ids.size(), 0);
  parallel_for(user_ids.size(), s.threads, [&](std::size_t i) {
    const auto refs = review_refs(ds, ds.by_user.at(user_ids[i]));
    const bool is_warm =
        classify_cold(EntityKind::user, entity_counts(refs), s.cold) == Warmth::warm;
    try {
      seeds[i] = build_user_profile(user_ids[i], refs, model, s.profile,
                                    user_seed(s.seed, user_ids[i]));
      warm[i] = is_warm;
    } catch (const ColdUser&) {
      seeds[i].reset();
    }
  });
  for (std::size_t i = 0; i < user_ids.size(); ++i)
    if (warm[i]) out.users.push_back(*seeds[i]);
  out.warm_users = out.users.size();

  std::vector<std::size_t> cold_idx;
  for (std::size_t i = 0; i < user_ids.size(); ++i)
    if (!warm[i]) cold_idx.push_back(i);
  if (!cold_idx.empty() && out.warm_users == 0)
    throw ConfigError("cold users exist but no warm user profile is available for collaborative fill");
  std::vector<PreferenceProfile> filled(cold_idx.size());
  std::vector<char> fallback(cold_idx.size(), 0);
  const std::span<const PreferenceProfile> warm_span(out.users.data(), out.warm_users);
  parallel_for(cold_idx.size(), s.threads, [&](std::size_t j) {
    const auto i = cold_idx[j];
    const auto seed = seeds[i] ? *seeds[i] : uniform_seed_profile(user_ids[i], model.topics());
    auto fill = fill_user_profile_cf(seed, warm_span, s.cf_k, {s.cold.min_user_reviews});
    filled[j] = std::move(fill.profile);
    fallback[j] = fill.unweighted_fallback;
  });
  for (std::size_t j = 0; j < filled.size(); ++j) {
    out.users.push_back(std::move(filled[j]));
    out.cf_fallbacks += fallback[j];
  }

  std::set<std::string> movie_ids;
  for (const auto& [id, _] : ds.by_movie) movie_ids.insert(id);
  for (const auto& [id, _] : aux) movie_ids.insert(id);
  const std::vector<std::string> movies(movie_ids.begin(), movie_ids.end());
  std::vector<std::optional<PreferenceProfile>> profiles(movies.size());
  parallel_for(movies.size(), s.threads, [&](std::size_t i) {
    std::vector<ReviewRef> refs;
    if (auto it = ds.by_movie.find(movies[i]); it != ds.by_movie.end())
      refs = review_refs(ds, it->second);
    try {
      profiles[i] = movie_profile(movies[i], refs, aux, model, s);
    } catch (const UnrecommendableMovie&) {
      profiles[i].reset();
    }
  });
  for (std::size_t i = 0; i < movies.size(); ++i) {
    if (profiles[i]) out.movies.push_back(std::move(*profiles[i]));
    else out.unrecommendable_movies.push_back(movies[i]);
  }
  return out;
}

}  // namespace revrec

#endif  // REVREC_PIPELINE_HPP_

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

#ifndef REVREC_COLDSTART_HPP_
#define REVREC_COLDSTART_HPP_

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "revrec/corpus.hpp"
#include "revrec/errors.hpp"
#include "revrec/lda.hpp"
#include "revrec/metrics.hpp"
#include "revrec/profiles.hpp"
#include "revrec/text.hpp"

namespace revrec {

struct Neighbor {
  std::string user_id;
  double similarity;
};

struct NeighborSet {
  std::string target;
  std::vector<Neighbor> neighbors;  // descending similarity, ties by user_id
  std::size_t k = 0;
};

// Seed for a user with no usable tokens at all.
inline PreferenceProfile uniform_seed_profile(const std::string& user_id, std::uint32_t topics) {
  return {EntityKind::user, user_id,
          TopicDistribution(topics, 1.0 / static_cast<double>(topics)), 0,
          Provenance::inferred};
}

namespace detail {

struct RankedNeighbor {
  std::size_t index;  // into the warm span
  double similarity;
};

inline std::vector<RankedNeighbor> rank_neighbors(const PreferenceProfile& target,
                                                  std::span<const PreferenceProfile> warm,
                                                  std::size_t k) {
  std::vector<RankedNeighbor> ranked;
  ranked.reserve(warm.size());
  for (std::size_t i = 0; i < warm.size(); ++i) {
    if (warm[i].entity_id == target.entity_id) continue;
    if (warm[i].theta.size() != target.theta.size())
      throw ArgumentError("profiles differ in topic count");
    ranked.push_back({i, cosine_similarity(target.theta, warm[i].theta)});
  }
  const auto keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), [&](const RankedNeighbor& a, const RankedNeighbor& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      const auto& ia = warm[a.index].entity_id;
                      const auto& ib = warm[b.index].entity_id;
                      if (ia != ib) return ia < ib;
                      return a.index < b.index;
                    });
  ranked.resize(keep);
  return ranked;
}

}  // namespace detail

/// Top-k warm users by cosine similarity of theta, excluding the target.
inline NeighborSet nearest_neighbors(const PreferenceProfile& target,
                                     std::span<const PreferenceProfile> warm, std::size_t k) {
  NeighborSet set{target.entity_id, {}, k};
  for (const auto& r : detail::rank_neighbors(target, warm, k))
    set.neighbors.push_back({warm[r.index].entity_id, r.similarity});
  return set;
}

// lambda = min(1, support / min_user_reviews): how much of the cold user's
// own (noisy) theta survives the blend.
struct BlendRule {
  std::uint32_t min_user_reviews = 2;

  double lambda(std::uint32_t support) const {
    return std::min(1.0, static_cast<double>(support) / static_cast<double>(min_user_reviews));
  }
};

struct CfFill {
  PreferenceProfile profile;
  NeighborSet neighbors;
  double lambda = 0.0;
  // All neighbor similarities were <= 0, so the unweighted mean was used.
  bool unweighted_fallback = false;
};

/// Completes a cold user's profile from warm users:
///   filled = lambda * seed + (1 - lambda) * (similarity-weighted mean of
///            the k nearest warm thetas), renormalized.
inline CfFill fill_user_profile_cf(const PreferenceProfile& cold,
                                   std::span<const PreferenceProfile> warm, std::size_t k,
                                   const BlendRule& rule) {
  if (k < 1) throw ConfigError("neighbor count k must be >= 1");
  if (rule.min_user_reviews < 1) throw ConfigError("min_user_reviews must be >= 1");
  CfFill out;
  const auto ranked = detail::rank_neighbors(cold, warm, k);
  if (ranked.empty()) throw ConfigError("collaborative fill needs at least one warm user profile");
  out.neighbors = {cold.entity_id, {}, k};
  for (const auto& r : ranked) out.neighbors.neighbors.push_back({warm[r.index].entity_id, r.similarity});

  const std::size_t K = cold.theta.size();
  std::vector<double> mean(K, 0.0);
  double weight_sum = 0.0;
  for (const auto& r : ranked) {
    if (r.similarity <= 0.0) continue;
    const auto& theta = warm[r.index].theta;
    for (std::size_t t = 0; t < K; ++t) mean[t] += r.similarity * theta[t];
    weight_sum += r.similarity;
  }
  if (weight_sum > 0.0) {
    for (auto& v : mean) v /= weight_sum;
  } else {
    out.unweighted_fallback = true;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (const auto& r : ranked)
      for (std::size_t t = 0; t < K; ++t) mean[t] += warm[r.index].theta[t];
    for (auto& v : mean) v /= static_cast<double>(ranked.size());
  }

  out.lambda = rule.lambda(cold.support);
  TopicDistribution filled(K);
  double total = 0.0;
  for (std::size_t t = 0; t < K; ++t) {
    filled[t] = out.lambda * cold.theta[t] + (1.0 - out.lambda) * mean[t];
    total += filled[t];
  }
  for (auto& v : filled) v /= total;
  out.profile = {EntityKind::user, cold.entity_id, std::move(filled), cold.support,
                 Provenance::cf_filled};
  return out;
}

struct EnrichOptions {
  InferenceParams inference;
  // Times each auxiliary document is repeated in the pseudo-document.
  std::uint32_t aux_weight = 1;
};

/// Folds a cold movie's reviews followed by its auxiliary documents (already
/// mapped to vocabulary ids) into one pseudo-document. Throws
/// UnrecommendableMovie when no in-vocabulary token exists.
inline PreferenceProfile enrich_movie_profile(const std::string& movie_id,
                                              std::span<const ReviewRef> reviews,
                                              std::span<const std::vector<WordId>> aux_tokens,
                                              const TopicModel& model, const EnrichOptions& opts,
                                              std::uint64_t seed) {
  auto doc = concatenate_reviews(reviews, false);
  std::uint32_t support = doc.contributing_reviews;
  for (const auto& a : aux_tokens) {
    if (a.empty()) continue;
    ++support;
    for (std::uint32_t rep = 0; rep < opts.aux_weight; ++rep)
      doc.tokens.insert(doc.tokens.end(), a.begin(), a.end());
  }
  if (doc.tokens.empty())
    throw UnrecommendableMovie("movie '" + movie_id +
                               "' has no in-vocabulary tokens in reviews or auxiliary text");
  return {EntityKind::movie, movie_id, infer_theta(model, doc.tokens, opts.inference, seed),
          support, Provenance::aux_enriched};
}

// Preprocesses auxiliary texts with the same pipeline as reviews.
inline PreferenceProfile enrich_movie_documents(const std::string& movie_id,
                                                std::span<const ReviewRef> reviews,
                                                std::span<const AuxDocument> aux,
                                                const TopicModel& model, const Vocabulary& vocab,
                                                const Preprocessor& pre, const EnrichOptions& opts,
                                                std::uint64_t seed) {
  std::vector<std::vector<WordId>> aux_tokens;
  aux_tokens.reserve(aux.size());
  for (const auto& a : aux) {
    if (a.movie_id != movie_id) continue;
    aux_tokens.push_back(to_ids(pre(a.text), vocab));
  }
  return enrich_movie_profile(movie_id, reviews, aux_tokens, model, opts, seed);
}

}  // namespace revrec

#endif  // REVREC_COLDSTART_HPP_

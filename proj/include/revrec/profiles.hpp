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

#ifndef REVREC_PROFILES_HPP_
#define REVREC_PROFILES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revrec/corpus.hpp"
#include "revrec/errors.hpp"
#include "revrec/lda.hpp"

namespace revrec {

enum class Provenance { inferred, cf_filled, aux_enriched };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::inferred: return "inferred";
    case Provenance::cf_filled: return "cf_filled";
    case Provenance::aux_enriched: return "aux_enriched";
  }
  return "?";
}

inline Provenance parse_provenance(std::string_view s) {
  if (s == "inferred") return Provenance::inferred;
  if (s == "cf_filled") return Provenance::cf_filled;
  if (s == "aux_enriched") return Provenance::aux_enriched;
  throw FormatError("unknown provenance '" + std::string(s) + "'");
}

// An entity's mixture over the K preferred features (topics).
struct PreferenceProfile {
  EntityKind kind = EntityKind::user;
  std::string entity_id;
  TopicDistribution theta;
  std::uint32_t support = 0;  // reviews (and aux documents) behind theta
  Provenance provenance = Provenance::inferred;
};

struct ColdPolicy {
  std::uint32_t min_user_reviews = 2;
  std::uint32_t min_user_tokens = 30;
  std::uint32_t min_movie_reviews = 5;

  void validate() const {
    if (min_user_reviews < 1 || min_user_tokens < 1 || min_movie_reviews < 1)
      throw ConfigError("cold-start thresholds must all be >= 1");
  }
};

enum class Warmth { warm, cold };

struct EntityCounts {
  std::size_t reviews = 0;
  std::size_t tokens = 0;  // in-vocabulary
};

inline Warmth classify_cold(EntityKind kind, const EntityCounts& counts, const ColdPolicy& policy) {
  if (kind == EntityKind::movie)
    return counts.reviews < policy.min_movie_reviews ? Warmth::cold : Warmth::warm;
  if (counts.reviews < policy.min_user_reviews || counts.tokens < policy.min_user_tokens)
    return Warmth::cold;
  return Warmth::warm;
}

// A review together with its in-vocabulary token ids.
struct ReviewRef {
  const ReviewRecord* record;
  std::span<const WordId> tokens;
};

inline std::vector<ReviewRef> review_refs(const Dataset& ds, std::span<const std::size_t> indices) {
  std::vector<ReviewRef> refs;
  refs.reserve(indices.size());
  for (auto i : indices) refs.push_back({&ds.reviews[i], ds.tokens[i]});
  return refs;
}

inline EntityCounts entity_counts(std::span<const ReviewRef> refs) {
  EntityCounts c{refs.size(), 0};
  for (const auto& r : refs) c.tokens += r.tokens.size();
  return c;
}

// How often a review's tokens enter the user document: positive (>= 7) and
// unrated reviews once, negative (<= 4) not at all, middling (5-6) once.
inline std::uint32_t rating_weight(const std::optional<int>& rating) {
  if (!rating) return 1;
  if (*rating <= 4) return 0;
  return 1;
}

struct ProfileOptions {
  InferenceParams inference;
  bool rating_weighting = true;  // applies to user profiles only
};

struct ConcatenatedDocument {
  std::vector<WordId> tokens;
  std::uint32_t contributing_reviews = 0;
};

/// Concatenates reviews ordered by (timestamp, review_id); absent
/// timestamps sort first. With weighting, each review repeats
/// rating_weight(rating) times.
inline ConcatenatedDocument concatenate_reviews(std::span<const ReviewRef> refs, bool weighted) {
  std::vector<ReviewRef> sorted(refs.begin(), refs.end());
  std::sort(sorted.begin(), sorted.end(), [](const ReviewRef& a, const ReviewRef& b) {
    const auto& ta = a.record->timestamp;
    const auto& tb = b.record->timestamp;
    if (ta != tb) return ta.value_or("") < tb.value_or("");
    return a.record->review_id < b.record->review_id;
  });
  ConcatenatedDocument doc;
  for (const auto& r : sorted) {
    const std::uint32_t w = weighted ? rating_weight(r.record->rating) : 1;
    if (w == 0 || r.tokens.empty()) continue;
    ++doc.contributing_reviews;
    for (std::uint32_t rep = 0; rep < w; ++rep)
      doc.tokens.insert(doc.tokens.end(), r.tokens.begin(), r.tokens.end());
  }
  return doc;
}

/// Folds a user's reviews into the global model. Throws ColdUser when no
/// usable token remains.
inline PreferenceProfile build_user_profile(const std::string& user_id,
                                            std::span<const ReviewRef> reviews,
                                            const TopicModel& model, const ProfileOptions& opts,
                                            std::uint64_t seed) {
  auto doc = concatenate_reviews(reviews, opts.rating_weighting);
  if (doc.tokens.empty()) throw ColdUser("cold user '" + user_id + "': no usable review tokens");
  return {EntityKind::user, user_id, infer_theta(model, doc.tokens, opts.inference, seed),
          doc.contributing_reviews, Provenance::inferred};
}

/// As build_user_profile, every review counted once. Throws ColdMovie when
/// there is nothing to fold in.
inline PreferenceProfile build_movie_profile(const std::string& movie_id,
                                             std::span<const ReviewRef> reviews,
                                             const TopicModel& model, const ProfileOptions& opts,
                                             std::uint64_t seed) {
  if (reviews.empty()) throw ColdMovie("cold movie '" + movie_id + "': no reviews");
  auto doc = concatenate_reviews(reviews, false);
  if (doc.tokens.empty())
    throw ColdMovie("cold movie '" + movie_id + "': no usable review tokens");
  return {EntityKind::movie, movie_id, infer_theta(model, doc.tokens, opts.inference, seed),
          doc.contributing_reviews, Provenance::inferred};
}

inline bool is_distribution(std::span<const double> p, double tol = 1e-9) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) return false;
    sum += v;
  }
  return !p.empty() && std::abs(sum - 1.0) <= tol;
}

}  // namespace revrec

#endif  // REVREC_PROFILES_HPP_

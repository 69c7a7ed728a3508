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

#ifndef REVREC_EVALUATION_HPP_
#define REVREC_EVALUATION_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "revrec/coldstart.hpp"
#include "revrec/corpus.hpp"
#include "revrec/errors.hpp"
#include "revrec/lda.hpp"
#include "revrec/parallel.hpp"
#include "revrec/pipeline.hpp"
#include "revrec/profiles.hpp"
#include "revrec/random.hpp"
#include "revrec/recommender.hpp"

namespace revrec {

// Random scoring is an ablation: it replaces the model's scores with
// seeded uniform draws so the analytic baseline can be checked.
enum class Scoring { model, random };

struct EvalConfig {
  std::uint32_t n_test_users = 1000;
  int positive_rating_min = 7;
  std::vector<double> completeness_levels = {0.4, 0.6, 0.8, 1.0};
  std::vector<std::size_t> cutoffs = {5, 10, 20, 50};
  RecommendOptions recommend;
  std::uint64_t seed = 0;
  // Held-out targets per test user; 0 takes every positively rated movie.
  std::uint32_t targets_per_user = 0;
  Scoring scoring = Scoring::model;

  void validate() const {
    if (n_test_users < 1) throw ConfigError("n_test_users must be >= 1");
    if (positive_rating_min < 1 || positive_rating_min > 10)
      throw ConfigError("positive_rating_min must be in 1..10");
    if (completeness_levels.empty()) throw ConfigError("no completeness levels");
    for (double c : completeness_levels)
      if (!(c > 0.0 && c <= 1.0)) throw ConfigError("completeness levels must be in (0, 1]");
    if (cutoffs.empty()) throw ConfigError("no K cutoffs");
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
      if (cutoffs[i] < 1) throw ConfigError("K cutoffs must be >= 1");
      if (i > 0 && cutoffs[i] <= cutoffs[i - 1])
        throw ConfigError("K cutoffs must be strictly ascending");
    }
  }
};

struct TestUser {
  std::string user_id;
  std::vector<std::string> targets;  // movie ids
};

struct TestUserSelection {
  std::vector<TestUser> users;
  std::size_t qualifying = 0;
  // Fewer users qualified than were requested.
  bool short_of_request = false;
};

/// Ranks users by review count (descending, ties by user_id) and keeps the
/// first n_test_users that rated at least one movie in
/// [positive_rating_min, 10]. Those movies become the user's targets.
inline TestUserSelection select_test_users(const Dataset& ds, const EvalConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (const auto& [id, idx] : ds.by_user) ranked.emplace_back(id, idx.size());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  TestUserSelection sel;
  for (const auto& [id, _] : ranked) {
    std::set<std::string> positive;
    for (auto i : ds.by_user.at(id)) {
      const auto& r = ds.reviews[i].rating;
      if (r && *r >= cfg.positive_rating_min) positive.insert(ds.reviews[i].movie_id);
    }
    if (positive.empty()) continue;
    ++sel.qualifying;
    if (sel.users.size() >= cfg.n_test_users) continue;
    std::vector<std::string> targets(positive.begin(), positive.end());
    if (cfg.targets_per_user > 0 && targets.size() > cfg.targets_per_user) {
      auto rng = Rng::substream(cfg.seed, "targets:" + id);
      rng.shuffle(targets);
      targets.resize(cfg.targets_per_user);
      std::sort(targets.begin(), targets.end());
    }
    sel.users.push_back({id, std::move(targets)});
  }
  sel.short_of_request = sel.users.size() < cfg.n_test_users;
  return sel;
}

/// Uniformly samples ceil(completeness * n) of the user's reviews, where n
/// counts the reviews not in `held_out`. One permutation per seed serves
/// every level, so the subsets are nested across completeness levels.
/// Returns dataset indices sorted ascending.
inline std::vector<std::size_t> mask_preferences(const Dataset& ds,
                                                 std::span<const std::size_t> user_reviews,
                                                 const std::unordered_set<std::size_t>& held_out,
                                                 double completeness, std::uint64_t seed) {
  if (!(completeness > 0.0 && completeness <= 1.0))
    throw ArgumentError("completeness must be in (0, 1]");
  std::vector<std::size_t> pool;
  for (auto i : user_reviews)
    if (!held_out.count(i)) pool.push_back(i);
  std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
    return ds.reviews[a].review_id < ds.reviews[b].review_id;
  });
  Rng rng(seed);
  rng.shuffle(pool);
  // The epsilon keeps 0.6 * 10 from rounding up to 7.
  auto take = static_cast<std::size_t>(
      std::ceil(completeness * static_cast<double>(pool.size()) - 1e-9));
  take = std::clamp<std::size_t>(take, pool.empty() ? 0 : 1, pool.size());
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// What one trial read, for leakage auditing.
struct TrialTrace {
  std::string user_id;
  std::string target_movie;
  double completeness = 0.0;
  std::vector<std::string> held_out_reviews;
  std::vector<std::string> user_profile_reviews;
  std::vector<std::string> movie_profile_reviews;
};

struct StratumStats {
  std::size_t trials = 0;
  std::vector<std::size_t> hits;         // per cutoff
  std::vector<double> baseline_sum;      // per cutoff, sum of min(1, K/|C|)
  double reciprocal_rank_sum = 0.0;

  double hit_rate(std::size_t c) const {
    return trials ? static_cast<double>(hits[c]) / static_cast<double>(trials) : 0.0;
  }
  double random_baseline(std::size_t c) const {
    return trials ? baseline_sum[c] / static_cast<double>(trials) : 0.0;
  }
  double mrr() const { return trials ? reciprocal_rank_sum / static_cast<double>(trials) : 0.0; }
};

struct LevelReport {
  double completeness = 0.0;
  StratumStats all;
  StratumStats warm;
  StratumStats cold;  // user went through collaborative fill
  std::map<std::size_t, std::size_t> rank_histogram;
};

struct EvalReport {
  EvalConfig config;
  std::vector<LevelReport> levels;
  std::size_t users_requested = 0;
  std::size_t qualifying_users = 0;
  std::size_t users_evaluated = 0;
  // Target movie had no usable profile once its held-out review was removed.
  std::size_t unrankable_trials = 0;
  std::size_t leakage_violations = 0;
};

struct EvalContext {
  const Dataset& dataset;
  const TopicModel& model;
  const AuxIndex& aux;
  ProfileSettings settings;
};

using TrialObserver = std::function<void(const TrialTrace&)>;

namespace detail {

struct TrialOutcome {
  std::size_t level;
  bool cold;
  std::size_t rank;        // 1-based
  std::size_t candidates;
  TrialTrace trace;
};

struct UserOutcome {
  std::vector<TrialOutcome> trials;
  std::size_t unrankable = 0;
};

inline std::vector<std::string> review_ids(std::span<const ReviewRef> refs) {
  std::vector<std::string> ids;
  for (const auto& r : refs) ids.push_back(r.record->review_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline bool overlaps(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (const auto& x : a)
    if (std::binary_search(b.begin(), b.end(), x)) return true;
  return false;
}

}  // namespace detail

/// Leave-one-out evaluation. For every test user, target movie and
/// completeness level, the user's profile is rebuilt from a masked subset
/// of their other reviews, the target movie's profile is rebuilt without
/// the user's review of it, and the target's rank among all candidate
/// movies (minus those the user reviewed) is recorded. Trials run in
/// parallel with per-trial seeds; aggregation is in test-user order.
inline EvalReport leave_one_out_eval(const EvalContext& ctx, const EvalConfig& cfg,
                                     const TrialObserver& observer = {}) {
  cfg.validate();
  const auto& ds = ctx.dataset;
  const auto& s = ctx.settings;
  const auto selection = select_test_users(ds, cfg);
  const auto catalog = build_all_profiles(ds, ctx.aux, ctx.model, s);
  const std::span<const PreferenceProfile> warm_users(catalog.users.data(), catalog.warm_users);

  std::unordered_map<std::string, std::size_t> movie_pos;
  for (std::size_t i = 0; i < catalog.movies.size(); ++i)
    movie_pos.emplace(catalog.movies[i].entity_id, i);

  std::vector<detail::UserOutcome> outcomes(selection.users.size());
  parallel_for(selection.users.size(), s.threads, [&](std::size_t u) {
    const auto& tu = selection.users[u];
    const auto& user_reviews = ds.by_user.at(tu.user_id);
    auto& out = outcomes[u];
    for (const auto& target : tu.targets) {
      std::unordered_set<std::size_t> held_out;
      std::unordered_set<std::string> exclusions;
      for (auto i : user_reviews) {
        if (ds.reviews[i].movie_id == target) held_out.insert(i);
        else exclusions.insert(ds.reviews[i].movie_id);
      }
      exclusions.erase(target);

      // Target movie without this user's review(s) of it.
      std::vector<ReviewRef> movie_refs;
      if (auto it = ds.by_movie.find(target); it != ds.by_movie.end())
        for (auto i : it->second)
          if (!held_out.count(i)) movie_refs.push_back({&ds.reviews[i], ds.tokens[i]});
      std::optional<PreferenceProfile> target_profile;
      try {
        target_profile = movie_profile(target, movie_refs, ctx.aux, ctx.model, s);
      } catch (const RecoverableError&) {
        ++out.unrankable;
        continue;
      }

      std::vector<PreferenceProfile> candidates;
      candidates.reserve(catalog.movies.size() + 1);
      for (const auto& m : catalog.movies)
        if (m.entity_id != target && !exclusions.count(m.entity_id)) candidates.push_back(m);
      candidates.push_back(*target_profile);

      const std::string trial_key = tu.user_id + "\x1f" + target;
      const auto mask_seed = derive_seed(cfg.seed, "mask", trial_key);
      for (std::size_t level = 0; level < cfg.completeness_levels.size(); ++level) {
        const auto subset = mask_preferences(ds, user_reviews, held_out,
                                             cfg.completeness_levels[level], mask_seed);
        const auto refs = review_refs(ds, subset);
        bool cold = classify_cold(EntityKind::user, entity_counts(refs), s.cold) == Warmth::cold;
        std::optional<PreferenceProfile> seed_profile;
        try {
          seed_profile = build_user_profile(tu.user_id, refs, ctx.model, s.profile,
                                            user_seed(s.seed, tu.user_id));
        } catch (const ColdUser&) {
          cold = true;
        }
        PreferenceProfile user;
        if (cold) {
          const auto seed = seed_profile ? *seed_profile
                                         : uniform_seed_profile(tu.user_id, ctx.model.topics());
          user = fill_user_profile_cf(seed, warm_users, s.cf_k, {s.cold.min_user_reviews}).profile;
        } else {
          user = std::move(*seed_profile);
        }

        std::vector<ScoredMovie> scored;
        scored.reserve(candidates.size());
        Metric order = cfg.recommend.metric;
        if (cfg.scoring == Scoring::random) {
          auto rng = Rng::substream(derive_seed(cfg.seed, "random-scores", trial_key), level);
          for (const auto& c : candidates) scored.push_back({c.entity_id, rng.uniform()});
          order = Metric::cosine;  // larger is better
        } else {
          for (const auto& c : candidates)
            scored.push_back({c.entity_id, score(user.theta, c.theta, cfg.recommend)});
        }
        std::sort(scored.begin(), scored.end(), [&](const ScoredMovie& a, const ScoredMovie& b) {
          return ranks_before(a, b, order);
        });
        std::size_t rank = 0;
        for (std::size_t r = 0; r < scored.size(); ++r) {
          if (scored[r].movie_id == target) {
            rank = r + 1;
            break;
          }
        }

        detail::TrialOutcome t{level, cold, rank, candidates.size(), {}};
        t.trace.user_id = tu.user_id;
        t.trace.target_movie = target;
        t.trace.completeness = cfg.completeness_levels[level];
        for (auto i : held_out) t.trace.held_out_reviews.push_back(ds.reviews[i].review_id);
        std::sort(t.trace.held_out_reviews.begin(), t.trace.held_out_reviews.end());
        t.trace.user_profile_reviews = detail::review_ids(refs);
        t.trace.movie_profile_reviews = detail::review_ids(movie_refs);
        out.trials.push_back(std::move(t));
      }
    }
  });

  EvalReport report;
  report.config = cfg;
  report.users_requested = cfg.n_test_users;
  report.qualifying_users = selection.qualifying;
  const std::size_t C = cfg.cutoffs.size();
  for (double c : cfg.completeness_levels) {
    LevelReport lr;
    lr.completeness = c;
    for (auto* st : {&lr.all, &lr.warm, &lr.cold}) {
      st->hits.assign(C, 0);
      st->baseline_sum.assign(C, 0.0);
    }
    report.levels.push_back(std::move(lr));
  }
  for (const auto& out : outcomes) {
    report.unrankable_trials += out.unrankable;
    if (!out.trials.empty()) ++report.users_evaluated;
    for (const auto& t : out.trials) {
      if (detail::overlaps(t.trace.held_out_reviews, t.trace.user_profile_reviews) ||
          detail::overlaps(t.trace.held_out_reviews, t.trace.movie_profile_reviews))
        ++report.leakage_violations;
      if (observer) observer(t.trace);
      auto& lr = report.levels[t.level];
      ++lr.rank_histogram[t.rank];
      for (auto* st : {&lr.all, t.cold ? &lr.cold : &lr.warm}) {
        ++st->trials;
        st->reciprocal_rank_sum += 1.0 / static_cast<double>(t.rank);
        for (std::size_t c = 0; c < C; ++c) {
          if (t.rank <= cfg.cutoffs[c]) ++st->hits[c];
          st->baseline_sum[c] += std::min(1.0, static_cast<double>(cfg.cutoffs[c]) /
                                                   static_cast<double>(t.candidates));
        }
      }
    }
  }
  return report;
}

}  // namespace revrec

#endif  // REVREC_EVALUATION_HPP_

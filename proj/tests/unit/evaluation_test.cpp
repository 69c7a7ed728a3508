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

#include "revrec/evaluation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "support/genre_world.hpp"

namespace revrec {
namespace {

ReviewRecord rec(std::string id, std::string user, std::string movie, int rating) {
  return {std::move(id), std::move(user), std::move(movie), rating, "", std::nullopt};
}

Dataset tiny(std::vector<ReviewRecord> reviews) {
  Dataset ds;
  ds.reviews = std::move(reviews);
  ds.tokens.assign(ds.reviews.size(), std::vector<WordId>{0, 1});
  ds.reindex();
  return ds;
}

const testing::GenreWorld& world() {
  static const testing::GenreWorld w = [] {
    testing::GenreDatasetSpec spec;
    spec.cold_movies_per_genre = 1;
    spec.aux_docs_per_cold_movie = 3;
    return testing::genre_world(spec);
  }();
  return w;
}

EvalContext context(unsigned threads = 1) {
  ProfileSettings s;
  s.seed = 21;
  s.threads = threads;
  return {world().ds, world().model, world().aux, s};
}

TEST(SelectTestUsersTest, MostActiveFirstTiesById) {
  auto ds = tiny({rec("1", "b", "m1", 8), rec("2", "b", "m2", 9), rec("3", "a", "m1", 7),
                  rec("4", "a", "m3", 2), rec("5", "c", "m1", 3), rec("6", "c", "m2", 4),
                  rec("7", "c", "m3", 1), rec("8", "d", "m2", 10)});
  EvalConfig cfg;
  cfg.n_test_users = 2;
  auto sel = select_test_users(ds, cfg);
  ASSERT_EQ(sel.users.size(), 2u);
  // c has most reviews but none positive.
  EXPECT_EQ(sel.users[0].user_id, "a");
  EXPECT_EQ(sel.users[0].targets, (std::vector<std::string>{"m1"}));
  EXPECT_EQ(sel.users[1].user_id, "b");
  EXPECT_EQ(sel.users[1].targets, (std::vector<std::string>{"m1", "m2"}));
  EXPECT_EQ(sel.qualifying, 3u);
  EXPECT_FALSE(sel.short_of_request);

  cfg.n_test_users = 10;
  sel = select_test_users(ds, cfg);
  EXPECT_EQ(sel.users.size(), 3u);
  EXPECT_TRUE(sel.short_of_request);

  cfg.targets_per_user = 1;
  sel = select_test_users(ds, cfg);
  EXPECT_EQ(sel.users[1].targets.size(), 1u);
}

TEST(MaskTest, SizesAndNesting) {
  std::vector<ReviewRecord> reviews;
  for (int i = 0; i < 11; ++i)
    reviews.push_back(rec("r" + std::to_string(i), "u", "m" + std::to_string(i), 8));
  auto ds = tiny(reviews);
  const auto& idx = ds.by_user.at("u");
  const std::unordered_set<std::size_t> held = {10};
  EXPECT_EQ(mask_preferences(ds, idx, held, 0.4, 5).size(), 4u);
  EXPECT_EQ(mask_preferences(ds, idx, held, 0.6, 5).size(), 6u);
  EXPECT_EQ(mask_preferences(ds, idx, held, 1.0, 5).size(), 10u);
  EXPECT_EQ(mask_preferences(ds, idx, held, 0.01, 5).size(), 1u);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::set<std::size_t> prev;
    for (double c : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      auto cur = mask_preferences(ds, idx, held, c, seed);
      EXPECT_FALSE(std::count(cur.begin(), cur.end(), 10));
      for (auto i : prev) EXPECT_TRUE(std::binary_search(cur.begin(), cur.end(), i));
      prev = {cur.begin(), cur.end()};
    }
  }
  auto one = tiny({rec("x", "v", "m", 9), rec("y", "v", "n", 9)});
  EXPECT_EQ(mask_preferences(one, one.by_user.at("v"), {1}, 0.4, 1).size(), 1u);
  EXPECT_THROW(mask_preferences(ds, idx, held, 0.0, 1), ArgumentError);
}

TEST(EvalConfigTest, Validation) {
  EvalConfig cfg;
  cfg.cutoffs = {10, 5};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.completeness_levels = {1.5};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(LeaveOneOutTest, CutoffCoveringAllCandidatesAlwaysHits) {
  EvalConfig cfg;
  cfg.n_test_users = 6;
  cfg.targets_per_user = 1;
  cfg.completeness_levels = {1.0};
  cfg.cutoffs = {1000};
  auto r = leave_one_out_eval(context(), cfg);
  ASSERT_GT(r.levels[0].all.trials, 0u);
  EXPECT_EQ(r.levels[0].all.hit_rate(0), 1.0);
  EXPECT_EQ(r.levels[0].all.random_baseline(0), 1.0);
}

// With random scores the hit rate estimates the analytic baseline; the
// tolerance is three binomial standard errors.
TEST(LeaveOneOutTest, RandomScoringMatchesBaseline) {
  EvalConfig cfg;
  cfg.n_test_users = 30;
  cfg.completeness_levels = {1.0};
  cfg.cutoffs = {5, 10, 20};
  cfg.scoring = Scoring::random;
  cfg.seed = 4;
  auto r = leave_one_out_eval(context(), cfg);
  const auto& st = r.levels[0].all;
  ASSERT_GE(st.trials, 200u);
  for (std::size_t c = 0; c < cfg.cutoffs.size(); ++c) {
    const double p = st.random_baseline(c);
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(st.trials));
    EXPECT_NEAR(st.hit_rate(c), p, 3 * se) << "K=" << cfg.cutoffs[c];
  }
}

TEST(LeaveOneOutTest, ModelBeatsBaseline) {
  EvalConfig cfg;
  cfg.n_test_users = 30;
  cfg.targets_per_user = 2;
  cfg.completeness_levels = {0.4, 1.0};
  cfg.cutoffs = {10};
  for (auto metric : {Metric::kl, Metric::cosine}) {
    cfg.recommend.metric = metric;
    auto r = leave_one_out_eval(context(), cfg);
    for (const auto& level : r.levels)
      EXPECT_GE(level.all.hit_rate(0), 3.0 * level.all.random_baseline(0)) << to_string(metric);
    EXPECT_EQ(r.leakage_violations, 0u);
    EXPECT_EQ(r.unrankable_trials, 0u);
    EXPECT_EQ(r.users_evaluated, 30u);
  }
}

// Short, noisy reviews: four of them do not always reveal the genre, nine
// do. alpha = 1 keeps profile sharpness from depending on document length
// (at K = 3 the 50/K default would favor equally short user and target
// documents).
TEST(LeaveOneOutTest, FullProfilesDoNotHurt) {
  testing::GenreDatasetSpec spec;
  spec.review_len = 5;
  spec.background_share = 0.5;
  static const auto noisy = testing::genre_world(spec, 200, 3, 1.0);
  ProfileSettings s;
  s.seed = 21;
  EvalContext ctx{noisy.ds, noisy.model, noisy.aux, s};
  EvalConfig cfg;
  cfg.completeness_levels = {0.4, 1.0};
  cfg.cutoffs = {10, 20};
  for (auto metric : {Metric::kl, Metric::cosine}) {
    cfg.recommend.metric = metric;
    auto r = leave_one_out_eval(ctx, cfg);
    ASSERT_EQ(r.levels[0].all.trials, 300u);
    for (std::size_t c = 0; c < cfg.cutoffs.size(); ++c)
      EXPECT_GE(r.levels[1].all.hit_rate(c), r.levels[0].all.hit_rate(c))
          << to_string(metric) << " K=" << cfg.cutoffs[c];
  }
}

// Cutoffs only widen the list, so hit rate cannot drop as K grows.
TEST(LeaveOneOutTest, HitRateMonotoneInK) {
  EvalConfig cfg;
  cfg.n_test_users = 20;
  cfg.cutoffs = {1, 2, 5, 10, 20, 50};
  auto r = leave_one_out_eval(context(), cfg);
  for (const auto& level : r.levels) {
    for (std::size_t c = 1; c < cfg.cutoffs.size(); ++c)
      EXPECT_GE(level.all.hit_rate(c), level.all.hit_rate(c - 1));
    EXPECT_GT(level.all.mrr(), 0.0);
    EXPECT_LE(level.all.mrr(), 1.0);
  }
  EXPECT_LE(r.users_evaluated, cfg.n_test_users);
}

TEST(LeaveOneOutTest, ProfilesNeverSeeHeldOutReview) {
  EvalConfig cfg;
  cfg.n_test_users = 10;
  cfg.completeness_levels = {0.4, 1.0};
  std::size_t traces = 0;
  auto r = leave_one_out_eval(context(), cfg, [&](const TrialTrace& t) {
    ++traces;
    EXPECT_FALSE(t.held_out_reviews.empty());
    for (const auto& h : t.held_out_reviews) {
      EXPECT_FALSE(std::count(t.user_profile_reviews.begin(), t.user_profile_reviews.end(), h));
      EXPECT_FALSE(std::count(t.movie_profile_reviews.begin(), t.movie_profile_reviews.end(), h));
    }
  });
  EXPECT_EQ(traces, r.levels[0].all.trials + r.levels[1].all.trials);
  EXPECT_EQ(r.leakage_violations, 0u);
}

TEST(LeaveOneOutTest, ThreadCountDoesNotChangeReport) {
  EvalConfig cfg;
  cfg.n_test_users = 12;
  cfg.targets_per_user = 2;
  auto a = leave_one_out_eval(context(1), cfg);
  auto b = leave_one_out_eval(context(4), cfg);
  ASSERT_EQ(a.levels.size(), b.levels.size());
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    EXPECT_EQ(a.levels[l].all.hits, b.levels[l].all.hits);
    EXPECT_EQ(a.levels[l].all.reciprocal_rank_sum, b.levels[l].all.reciprocal_rank_sum);
    EXPECT_EQ(a.levels[l].rank_histogram, b.levels[l].rank_histogram);
  }
}

// A cold user (one short review) is completed from neighbors and lands in
// the cold stratum.
TEST(LeaveOneOutTest, ColdUsersCountedSeparately) {
  auto reviews = world().raw.reviews;
  ReviewRecord extra = reviews.front();
  extra.review_id = "zz_cold_a";
  extra.user_id = "zz_cold";
  reviews.push_back(extra);
  extra = reviews[20];
  extra.review_id = "zz_cold_b";
  extra.user_id = "zz_cold";
  extra.text = extra.text.substr(0, 40);
  reviews.push_back(extra);
  auto ds = Dataset::build(reviews, world().vocab, world().pre);
  ProfileSettings s;
  EvalContext ctx{ds, world().model, world().aux, s};
  EvalConfig cfg;
  cfg.n_test_users = 1000;
  cfg.completeness_levels = {1.0};
  auto r = leave_one_out_eval(ctx, cfg);
  EXPECT_GT(r.levels[0].cold.trials, 0u);
  EXPECT_EQ(r.levels[0].cold.trials + r.levels[0].warm.trials, r.levels[0].all.trials);
}

}  // namespace
}  // namespace revrec

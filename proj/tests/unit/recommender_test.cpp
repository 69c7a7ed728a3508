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

#include "revrec/recommender.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "revrec/random.hpp"
#include "support/synthetic.hpp"

namespace revrec {
namespace {

// Independent oracle: long-double summation of P ln(P/Q).
long double kl_oracle(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) s += static_cast<long double>(p[i]) * std::log(static_cast<long double>(p[i]) / q[i]);
  return s;
}

std::vector<double> random_distribution(Rng& rng, std::size_t k) {
  return testing::dirichlet(rng, k, 0.5 + 2.0 * rng.uniform());
}

PreferenceProfile movie(std::string id, TopicDistribution t) {
  return {EntityKind::movie, std::move(id), std::move(t), 3, Provenance::inferred};
}

PreferenceProfile user(TopicDistribution t) {
  return {EntityKind::user, "u", std::move(t), 3, Provenance::inferred};
}

TEST(KlDivergenceTest, IdentityIsZero) {
  const std::vector<double> p = {0.2, 0.3, 0.5};
  EXPECT_EQ(kl_divergence(p, p), 0.0);
}

TEST(KlDivergenceTest, HandOracleValue) {
  const std::vector<double> p = {0.5, 0.5}, q = {0.25, 0.75};
  // 0.5 ln 2 + 0.5 ln(2/3)
  EXPECT_NEAR(kl_divergence(p, q), 0.143841036225890, 1e-12);
  EXPECT_NEAR(kl_divergence(p, q), static_cast<double>(kl_oracle(p, q)), 1e-15);
  // Reverse direction: 0.25 ln(0.5) + 0.75 ln(1.5) = 0.130812035941...
  EXPECT_NEAR(kl_divergence(q, p), static_cast<double>(kl_oracle(q, p)), 1e-15);
  EXPECT_NE(kl_divergence(p, q), kl_divergence(q, p));
}

TEST(KlDivergenceTest, NonPositiveQIsNumericError) {
  const std::vector<double> p = {0.5, 0.5}, q = {1.0, 0.0};
  EXPECT_THROW(kl_divergence(p, q), NumericError);
  const std::vector<double> shorter = {1.0};
  EXPECT_THROW(kl_divergence(p, shorter), ArgumentError);
}

// Gibbs' inequality and asymmetry over random pairs, checked against the
// long-double oracle.
TEST(KlDivergenceTest, RandomizedSuite) {
  Rng rng(123);
  int asymmetric = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto k = 2 + rng.below(20);
    auto p = random_distribution(rng, k);
    auto q = random_distribution(rng, k);
    const double d = kl_divergence(p, q);
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(d, static_cast<double>(kl_oracle(p, q)), 1e-10 * std::max(1.0, d));
    EXPECT_LE(kl_divergence(p, p), 1e-12);
    if (std::abs(d - kl_divergence(q, p)) > 1e-12) ++asymmetric;
  }
  EXPECT_GT(asymmetric, 1990);
}

TEST(JensenShannonTest, SymmetricAndBounded) {
  const std::vector<double> p = {0.5, 0.5}, q = {1.0, 0.0};
  EXPECT_NEAR(jensen_shannon(p, q), jensen_shannon(q, p), 1e-15);
  EXPECT_LE(jensen_shannon(p, q), std::log(2.0));
  EXPECT_EQ(jensen_shannon(p, p), 0.0);
}

TEST(CosineTest, Examples) {
  const std::vector<double> a = {1.0, 0.0}, b = {0.0, 1.0}, h = {0.5, 0.5};
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-15);
  EXPECT_EQ(cosine_similarity(a, b), 0.0);
  // 0.5 / (sqrt(0.5) * 1)
  EXPECT_NEAR(cosine_similarity(h, a), 0.7071067811865476, 1e-12);
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_THROW(cosine_similarity(zero, a), NumericError);
}

TEST(RecommendTest, IdenticalCandidateRanksFirst) {
  const auto u = user({0.6, 0.3, 0.1});
  std::vector<PreferenceProfile> c = {movie("a", {0.1, 0.3, 0.6}), movie("b", {0.6, 0.3, 0.1}),
                                      movie("c", {0.34, 0.33, 0.33})};
  for (auto m : {Metric::kl, Metric::cosine}) {
    auto list = recommend_top_k(u, c, 3, {m, KlDirection::user_to_movie});
    EXPECT_EQ(list.entries[0].movie_id, "b");
    EXPECT_EQ(list.metric, m);
  }
}

// KL(user||M1) = 0.9 ln(0.9/0.8) + 0.1 ln(0.1/0.2) ~ 0.0367;
// KL(user||M2) = 0.9 ln(0.9/0.2) + 0.1 ln(0.1/0.8) ~ 1.1457.
TEST(RecommendTest, KlPicksCloserMovie) {
  const auto u = user({0.9, 0.1});
  std::vector<PreferenceProfile> c = {movie("M2", {0.2, 0.8}), movie("M1", {0.8, 0.2})};
  auto list = recommend_top_k(u, c, 1, {});
  ASSERT_EQ(list.entries.size(), 1u);
  EXPECT_EQ(list.entries[0].movie_id, "M1");
  EXPECT_NEAR(list.entries[0].score, static_cast<double>(kl_oracle({0.9, 0.1}, {0.8, 0.2})), 1e-15);
}

TEST(RecommendTest, ExclusionsAndEmptyCandidates) {
  const auto u = user({0.5, 0.5});
  std::vector<PreferenceProfile> c = {movie("a", {0.4, 0.6}), movie("b", {0.6, 0.4})};
  EXPECT_THROW(recommend_top_k(u, c, 2, {}, {"a", "b"}), NothingToRecommend);
  auto list = recommend_top_k(u, c, 5, {}, {"a"});
  ASSERT_EQ(list.entries.size(), 1u);
  EXPECT_EQ(list.entries[0].movie_id, "b");
  std::vector<PreferenceProfile> dup = {movie("a", {0.4, 0.6}), movie("a", {0.6, 0.4})};
  EXPECT_THROW(recommend_top_k(u, dup, 1, {}), ArgumentError);
  EXPECT_THROW(recommend_top_k(u, c, 0, {}), ArgumentError);
}

TEST(RecommendTest, TiesBrokenByMovieId) {
  const auto u = user({0.5, 0.5});
  std::vector<PreferenceProfile> c = {movie("z", {0.3, 0.7}), movie("y", {0.7, 0.3}),
                                      movie("x", {0.3, 0.7})};
  auto list = recommend_top_k(u, c, 3, {Metric::cosine, KlDirection::user_to_movie});
  EXPECT_EQ(list.entries[0].movie_id, "x");
  EXPECT_EQ(list.entries[1].movie_id, "y");
  EXPECT_EQ(list.entries[2].movie_id, "z");
}

// Properties over random candidate sets: a full-length list is a
// permutation in metric order, its head equals an exhaustive scan, and
// appending a candidate keeps the existing order.
TEST(RecommendTest, RankingProperties) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto K = 2 + rng.below(8);
    const auto u = user(random_distribution(rng, K));
    std::vector<PreferenceProfile> c;
    const auto n = 1 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) c.push_back(movie("m" + std::to_string(i), random_distribution(rng, K)));
    for (auto metric : {Metric::kl, Metric::cosine}) {
      RecommendOptions opts{metric, KlDirection::user_to_movie};
      auto full = recommend_top_k(u, c, c.size(), opts);
      ASSERT_EQ(full.entries.size(), c.size());
      std::vector<std::string> ids;
      for (const auto& e : full.entries) ids.push_back(e.movie_id);
      std::sort(ids.begin(), ids.end());
      EXPECT_EQ(std::unique(ids.begin(), ids.end()), ids.end());

      // exhaustive scan for the best candidate
      std::size_t best = 0;
      for (std::size_t i = 1; i < c.size(); ++i) {
        const double si = metric == Metric::kl ? static_cast<double>(kl_oracle(u.theta, c[i].theta))
                                               : cosine_similarity(u.theta, c[i].theta);
        const double sb = metric == Metric::kl ? static_cast<double>(kl_oracle(u.theta, c[best].theta))
                                               : cosine_similarity(u.theta, c[best].theta);
        if (metric == Metric::kl ? si < sb : si > sb) best = i;
      }
      EXPECT_EQ(full.entries[0].movie_id, c[best].entity_id);

      for (std::size_t i = 1; i < full.entries.size(); ++i)
        EXPECT_FALSE(ranks_before(full.entries[i], full.entries[i - 1], metric));

      // A new candidate never reorders the existing ones.
      const auto worst_topic = static_cast<std::size_t>(
          std::min_element(u.theta.begin(), u.theta.end()) - u.theta.begin());
      TopicDistribution bad(K, 1e-9);
      bad[worst_topic] = 1.0 - 1e-9 * static_cast<double>(K - 1);
      auto extended = c;
      extended.push_back(movie("zzz_new", bad));
      auto after = recommend_top_k(u, extended, extended.size(), opts);
      std::vector<std::string> before_ids, after_ids;
      for (const auto& e : full.entries) before_ids.push_back(e.movie_id);
      for (const auto& e : after.entries)
        if (e.movie_id != "zzz_new") after_ids.push_back(e.movie_id);
      EXPECT_EQ(before_ids, after_ids);
    }
  }
}

}  // namespace
}  // namespace revrec

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

#include "revrec/lda.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>
#include <vector>

#include "support/alignment.hpp"
#include "support/synthetic.hpp"

namespace revrec {
namespace {

using Docs = std::vector<std::vector<WordId>>;

bool is_distribution_for_test(const TopicDistribution& p) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= 1e-9;
}

const testing::PlantedCorpus& planted() {
  static const auto c = testing::planted_corpus(3, 20, 600, 50, 0.3, 2024);
  return c;
}

LdaParams params(std::uint32_t K, std::uint32_t iters, std::uint64_t seed,
                 std::optional<double> alpha = std::nullopt) {
  LdaParams p;
  p.topics = K;
  p.iterations = iters;
  p.seed = seed;
  p.alpha = alpha;
  return p;
}

TEST(GibbsWeightTest, HandEvaluatedConditional) {
  // (1 + 0.5) (2 + 0.1) / (4 + 10 * 0.1) = 1.5 * 2.1 / 5
  EXPECT_NEAR(collapsed_gibbs_weight(1, 2, 4, 0.5, 0.1, 10 * 0.1), 0.63, 1e-15);
}

TEST(LdaParamsTest, DefaultsFollowCitedTool) {
  LdaParams p;
  EXPECT_EQ(p.topics, 50u);
  EXPECT_EQ(p.iterations, 1000u);
  EXPECT_DOUBLE_EQ(p.resolved_alpha(), 1.0);
  EXPECT_DOUBLE_EQ(p.beta, 0.1);
  p.topics = 3;
  EXPECT_DOUBLE_EQ(p.resolved_alpha(), 50.0 / 3.0);
}

TEST(TrainLdaTest, SingleTopicEqualsCorpusCounts) {
  const Docs docs = {{0, 1, 1, 2}, {2, 2, 3}, {0}};
  auto m = train_lda(docs, 4, params(1, 5, 1));
  EXPECT_EQ(m.topic_word(), (std::vector<std::uint32_t>{2, 2, 3, 1}));
  EXPECT_EQ(m.topic_totals()[0], 8u);
  EXPECT_EQ(m.iterations_run(), 5u);
}

TEST(TrainLdaTest, RejectsBadInput) {
  const Docs empty;
  EXPECT_THROW(train_lda(empty, 3, params(2, 1, 1)), ArgumentError);
  const Docs with_empty = {{0, 1}, {}};
  EXPECT_THROW(train_lda(with_empty, 3, params(2, 1, 1)), ArgumentError);
  const Docs ok = {{0, 1}};
  EXPECT_THROW(train_lda(ok, 3, params(0, 1, 1)), ArgumentError);
  EXPECT_THROW(train_lda(ok, 3, params(2, 0, 1)), ArgumentError);
  EXPECT_THROW(train_lda(ok, 1, params(2, 1, 1)), ArgumentError);  // id 1 >= V
  auto neg = params(2, 1, 1, -1.0);
  EXPECT_THROW(train_lda(ok, 3, neg), ArgumentError);
}

TEST(TrainLdaTest, RecoversPlantedTopics) {
  const auto& c = planted();
  auto m = train_lda(c.docs, c.vocab_size, params(3, 200, 5));
  auto a = testing::align_topics(testing::recovered_phi(m), c.phi);
  EXPECT_LT(a.mean_l1, 0.1);
}

TEST(TrainLdaTest, CountsConservedAfterEverySweep) {
  const auto& c = planted();
  std::size_t total = 0;
  for (const auto& d : c.docs) total += d.size();
  int sweeps = 0;
  train_lda(c.docs, c.vocab_size, params(3, 30, 9), [&](const GibbsSampler& s) {
    ++sweeps;
    std::uint64_t sum_k = 0;
    for (std::uint32_t k = 0; k < s.topics(); ++k) {
      std::uint64_t row = 0;
      for (WordId w = 0; w < s.vocab_size(); ++w) row += s.topic_word_count(k, w);
      ASSERT_EQ(row, s.topic_totals()[k]);
      sum_k += s.topic_totals()[k];
    }
    ASSERT_EQ(sum_k, total);
    for (std::size_t d = 0; d < s.documents(); ++d) {
      const auto nd = s.doc_topic(d);
      ASSERT_EQ(std::accumulate(nd.begin(), nd.end(), std::size_t{0}), s.doc_length(d));
      std::vector<std::uint32_t> recount(s.topics(), 0);
      for (auto z : s.assignments(d)) ++recount[z];
      ASSERT_TRUE(std::equal(recount.begin(), recount.end(), nd.begin()));
    }
  });
  EXPECT_EQ(sweeps, 30);
}

TEST(TrainLdaTest, FixedSeedIsBitIdentical) {
  const auto& c = planted();
  auto a = train_lda(c.docs, c.vocab_size, params(3, 20, 77));
  auto b = train_lda(c.docs, c.vocab_size, params(3, 20, 77));
  auto other = train_lda(c.docs, c.vocab_size, params(3, 20, 78));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.topic_word(), other.topic_word());
}

TEST(TrainLdaTest, LikelihoodTrendsUpward) {
  const auto& c = planted();
  std::vector<double> ll;
  train_lda(c.docs, c.vocab_size, params(3, 100, 3),
            [&](const GibbsSampler& s) { ll.push_back(s.log_likelihood()); });
  const std::size_t tenth = ll.size() / 10;
  const double first = std::accumulate(ll.begin(), ll.begin() + tenth, 0.0) / tenth;
  const double last = std::accumulate(ll.end() - tenth, ll.end(), 0.0) / tenth;
  EXPECT_GE(last, first);
}

// Hand check of the collapsed log joint on a tiny state: one document
// "0 0" with K = 1, V = 2.
TEST(TrainLdaTest, LogLikelihoodClosedForm) {
  const Docs docs = {{0, 0}};
  LdaParams p = params(1, 1, 1, 0.5);
  p.beta = 0.1;
  GibbsSampler s(docs, 2, p);
  const double expected = std::lgamma(0.2) - std::lgamma(2.2) + std::lgamma(2.1) - std::lgamma(0.1) +
                          std::lgamma(0.5) - std::lgamma(2.5) + std::lgamma(2.5) - std::lgamma(0.5);
  EXPECT_NEAR(s.log_likelihood(), expected, 1e-12);
}

TopicModel sharp_two_topic_model() {
  // Topic 0 owns word 0, topic 1 owns word 1, both overwhelmingly.
  return TopicModel(2, 2, 0.5, 0.1, {1000000, 0, 0, 1000000}, 1, 0);
}

TEST(InferThetaTest, SmoothedEstimatorFromFinalCounts) {
  auto m = sharp_two_topic_model();
  const std::vector<WordId> doc = {0, 0, 0, 0};
  auto theta = infer_theta(m, doc, {}, 1);
  // (4 + 0.5) / (4 + 2 * 0.5), (0 + 0.5) / 5
  EXPECT_NEAR(theta[0], 0.9, 1e-12);
  EXPECT_NEAR(theta[1], 0.1, 1e-12);
}

TEST(InferThetaTest, SingleTopicIsCertain) {
  TopicModel m(1, 3, 50.0, 0.1, {5, 1, 2}, 1, 0);
  const std::vector<WordId> doc = {2, 1};
  EXPECT_EQ(infer_theta(m, doc, {}, 4), (TopicDistribution{1.0}));
}

TEST(InferThetaTest, PlantedTopicIsArgmax) {
  const auto& c = planted();
  auto m = train_lda(c.docs, c.vocab_size, params(3, 200, 5));
  auto a = testing::align_topics(testing::recovered_phi(m), c.phi);
  for (std::uint32_t planted_topic = 0; planted_topic < 3; ++planted_topic) {
    auto doc = testing::pure_document(c, planted_topic, 60, 100 + planted_topic);
    auto theta = infer_theta(m, doc, {}, 17);
    EXPECT_TRUE(is_distribution_for_test(theta));
    const auto best = static_cast<std::uint32_t>(std::max_element(theta.begin(), theta.end()) - theta.begin());
    EXPECT_EQ(a.planted_for[best], planted_topic);
  }
}

TEST(InferThetaTest, ModelIsNeverMutatedAndSeedIsDeterministic) {
  const auto& c = planted();
  auto m = train_lda(c.docs, c.vocab_size, params(3, 30, 5));
  const auto before = m.topic_word();
  const auto totals = m.topic_totals();
  std::vector<TopicDistribution> first;
  for (std::size_t d = 0; d < 20; ++d) first.push_back(infer_theta(m, c.docs[d], {}, d));
  for (std::size_t d = 0; d < 20; ++d) EXPECT_EQ(infer_theta(m, c.docs[d], {}, d), first[d]);
  EXPECT_EQ(m.topic_word(), before);
  EXPECT_EQ(m.topic_totals(), totals);
}

TEST(InferThetaTest, ConcurrentCallsAgreeWithSerial) {
  const auto& c = planted();
  auto m = train_lda(c.docs, c.vocab_size, params(3, 30, 5));
  std::vector<TopicDistribution> serial(40), parallel(40);
  for (std::size_t d = 0; d < 40; ++d) serial[d] = infer_theta(m, c.docs[d], {}, d);
  parallel_for(40, 4, [&](std::size_t d) { parallel[d] = infer_theta(m, c.docs[d], {}, d); });
  EXPECT_EQ(serial, parallel);
}

TEST(InferThetaTest, AveragingIsADistributionToo) {
  const auto& c = planted();
  auto m = train_lda(c.docs, c.vocab_size, params(3, 30, 5));
  InferenceParams p;
  p.average_samples = true;
  auto theta = infer_theta(m, c.docs[0], p, 3);
  EXPECT_TRUE(is_distribution_for_test(theta));
}

TEST(InferThetaTest, EmptyDocumentIsUndefinedProfile) {
  auto m = sharp_two_topic_model();
  EXPECT_THROW(infer_theta(m, std::vector<WordId>{}, {}, 1), UndefinedProfile);
  EXPECT_THROW(infer_theta(m, std::vector<WordId>{7}, {}, 1), ArgumentError);
}

TEST(TopWordsTest, PlantedTopWordLeadsEachTopic) {
  const auto& c = planted();
  auto m = train_lda(c.docs, c.vocab_size, params(3, 200, 5));
  auto a = testing::align_topics(testing::recovered_phi(m), c.phi);
  for (std::uint32_t k = 0; k < 3; ++k) {
    auto top = top_words(m, k, 5);
    ASSERT_EQ(top.size(), 5u);
    // Rank 0 of each planted block carries the most mass.
    EXPECT_EQ(top[0].word, a.planted_for[k] * 20);
    for (std::size_t i = 1; i < top.size(); ++i) EXPECT_GE(top[i - 1].probability, top[i].probability);
  }
}

TEST(TopWordsTest, FullListIsNormalizedAndTiesGoByWordId) {
  TopicModel m(2, 4, 0.5, 0.1, {3, 1, 1, 0, 0, 0, 0, 5}, 1, 0);
  auto all = top_words(m, 0, 10);
  ASSERT_EQ(all.size(), 4u);
  double sum = 0.0;
  for (const auto& wp : all) sum += wp.probability;
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_EQ(all[0].word, 0u);
  EXPECT_EQ(all[1].word, 1u);  // tie with word 2
  EXPECT_EQ(all[2].word, 2u);
  EXPECT_THROW(top_words(m, 2, 3), ArgumentError);
  EXPECT_THROW(top_words(m, 0, 0), ArgumentError);
}

TEST(ModelFileTest, RoundTripIsExact) {
  const auto& c = planted();
  auto m = train_lda(c.docs, c.vocab_size, params(3, 10, 5), {}, 0x1234, 0x5678);
  std::stringstream buf;
  save_model(m, buf);
  const auto bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, kModelMagic.size()), kModelMagic);
  auto back = load_model(buf);
  EXPECT_EQ(back, m);
  std::stringstream again;
  save_model(back, again);
  EXPECT_EQ(again.str(), bytes);
}

TEST(ModelFileTest, CountsAreLittleEndianU32AfterHeader) {
  TopicModel m(1, 2, 0.5, 0.1, {0x01020304, 5}, 3, 9);
  std::stringstream buf;
  save_model(m, buf);
  const auto bytes = buf.str();
  std::uint64_t len = 0;
  for (int i = 7; i >= 0; --i) len = (len << 8) | static_cast<unsigned char>(bytes[kModelMagic.size() + i]);
  const auto header = nlohmann::json::parse(bytes.substr(kModelMagic.size() + 8, len));
  EXPECT_EQ(header["K"], 1);
  EXPECT_EQ(header["V"], 2);
  EXPECT_EQ(header["iterations_run"], 3);
  EXPECT_EQ(header["seed"], 9);
  const auto body = bytes.substr(kModelMagic.size() + 8 + len);
  ASSERT_EQ(body.size(), 12u);  // 2 counts + 1 total
  EXPECT_EQ(static_cast<unsigned char>(body[0]), 0x04);
  EXPECT_EQ(static_cast<unsigned char>(body[3]), 0x01);
}

TEST(ModelFileTest, RejectsGarbage) {
  std::stringstream bad("not a model at all");
  EXPECT_THROW(load_model(bad), FormatError);
  TopicModel m(1, 2, 0.5, 0.1, {1, 5}, 3, 9);
  std::stringstream buf;
  save_model(m, buf);
  auto truncated = buf.str();
  truncated.pop_back();
  std::stringstream t(truncated);
  EXPECT_THROW(load_model(t), FormatError);
}

}  // namespace
}  // namespace revrec

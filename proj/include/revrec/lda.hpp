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

#ifndef REVREC_LDA_HPP_
#define REVREC_LDA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "revrec/corpus.hpp"
#include "revrec/errors.hpp"
#include "revrec/random.hpp"

namespace revrec {

using TopicDistribution = std::vector<double>;

struct LdaParams {
  std::uint32_t topics = 50;
  // Unset means 50 / topics.
  std::optional<double> alpha;
  double beta = 0.1;
  std::uint32_t iterations = 1000;
  std::uint64_t seed = 0;

  double resolved_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(topics); }
};

/// A trained global topic model: K x V topic-word counts plus the
/// hyperparameters they were sampled under. Immutable once built; safe to
/// share across threads.
class TopicModel {
 public:
  TopicModel() = default;

  TopicModel(std::uint32_t topics, std::uint32_t vocab_size, double alpha, double beta,
             std::vector<std::uint32_t> topic_word, std::uint32_t iterations_run,
             std::uint64_t seed, std::uint64_t vocab_checksum = 0,
             std::uint64_t preprocess_fingerprint = 0)
      : topics_(topics),
        vocab_size_(vocab_size),
        alpha_(alpha),
        beta_(beta),
        topic_word_(std::move(topic_word)),
        iterations_run_(iterations_run),
        seed_(seed),
        vocab_checksum_(vocab_checksum),
        preprocess_fingerprint_(preprocess_fingerprint) {
    if (topics_ < 1) throw ArgumentError("topic count must be >= 1");
    if (vocab_size_ < 1) throw ArgumentError("vocabulary size must be >= 1");
    if (!(alpha_ > 0.0) || !(beta_ > 0.0)) throw ArgumentError("alpha and beta must be > 0");
    if (topic_word_.size() != std::size_t{topics_} * vocab_size_)
      throw ArgumentError("topic-word matrix has the wrong shape");
    topic_totals_.assign(topics_, 0);
    for (std::uint32_t k = 0; k < topics_; ++k) {
      std::uint64_t sum = 0;
      for (std::uint32_t w = 0; w < vocab_size_; ++w) sum += count(k, w);
      if (sum > UINT32_MAX) throw ArgumentError("topic total overflows 32 bits");
      topic_totals_[k] = static_cast<std::uint32_t>(sum);
    }
    // Word-major phi table; fold-in reads one word's K entries at a time.
    phi_by_word_.resize(topic_word_.size());
    const double vbeta = static_cast<double>(vocab_size_) * beta_;
    for (std::uint32_t k = 0; k < topics_; ++k) {
      const double denom = static_cast<double>(topic_totals_[k]) + vbeta;
      for (std::uint32_t w = 0; w < vocab_size_; ++w)
        phi_by_word_[std::size_t{w} * topics_ + k] = (count(k, w) + beta_) / denom;
    }
  }

  std::uint32_t topics() const { return topics_; }
  std::uint32_t vocab_size() const { return vocab_size_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::uint32_t iterations_run() const { return iterations_run_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t vocab_checksum() const { return vocab_checksum_; }
  std::uint64_t preprocess_fingerprint() const { return preprocess_fingerprint_; }

  // Row-major K x V.
  const std::vector<std::uint32_t>& topic_word() const { return topic_word_; }
  const std::vector<std::uint32_t>& topic_totals() const { return topic_totals_; }

  std::uint32_t count(std::uint32_t k, WordId w) const {
    return topic_word_[std::size_t{k} * vocab_size_ + w];
  }

  // (n_kw + beta) / (n_k + V * beta)
  double phi(std::uint32_t k, WordId w) const {
    return phi_by_word_[std::size_t{w} * topics_ + k];
  }

  std::span<const double> phi_of_word(WordId w) const {
    return {phi_by_word_.data() + std::size_t{w} * topics_, topics_};
  }

  std::vector<double> phi_row(std::uint32_t k) const {
    std::vector<double> row(vocab_size_);
    for (WordId w = 0; w < vocab_size_; ++w) row[w] = phi(k, w);
    return row;
  }

  bool operator==(const TopicModel& o) const {
    return topics_ == o.topics_ && vocab_size_ == o.vocab_size_ && alpha_ == o.alpha_ &&
           beta_ == o.beta_ && topic_word_ == o.topic_word_ &&
           iterations_run_ == o.iterations_run_ && seed_ == o.seed_ &&
           vocab_checksum_ == o.vocab_checksum_ &&
           preprocess_fingerprint_ == o.preprocess_fingerprint_;
  }

 private:
  std::uint32_t topics_ = 0;
  std::uint32_t vocab_size_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::vector<std::uint32_t> topic_word_;
  std::vector<std::uint32_t> topic_totals_;
  std::vector<double> phi_by_word_;
  std::uint32_t iterations_run_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t vocab_checksum_ = 0;
  std::uint64_t preprocess_fingerprint_ = 0;
};

/// Unnormalized collapsed Gibbs conditional for one topic, all counts
/// taken with the current token removed.
inline double collapsed_gibbs_weight(double doc_topic, double topic_word, double topic_total,
                                     double alpha, double beta, double vbeta) {
  return (doc_topic + alpha) * (topic_word + beta) / (topic_total + vbeta);
}

/// Collapsed Gibbs sampler over a fixed document set.
///
/// Each token's topic is resampled from
///   p(z = k) ~ (n_dk + alpha) (n_kw + beta) / (n_k + V beta)
/// with the token's own assignment removed from all three counts. Sweeps
/// visit documents and positions in order; with a fixed seed the chain is
/// bit-reproducible.
class GibbsSampler {
 public:
  GibbsSampler(std::span<const std::vector<WordId>> docs, std::uint32_t vocab_size,
               const LdaParams& params)
      : topics_(params.topics),
        vocab_size_(vocab_size),
        alpha_(params.resolved_alpha()),
        beta_(params.beta),
        seed_(params.seed),
        rng_(params.seed) {
    if (topics_ < 1) throw ArgumentError("topic count must be >= 1");
    if (vocab_size_ < 1) throw ArgumentError("vocabulary is empty");
    if (!(alpha_ > 0.0) || !(beta_ > 0.0)) throw ArgumentError("alpha and beta must be > 0");
    if (docs.empty()) throw ArgumentError("no training documents");

    doc_start_.reserve(docs.size() + 1);
    doc_start_.push_back(0);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      if (docs[d].empty())
        throw ArgumentError("training document " + std::to_string(d) + " has no tokens");
      for (WordId w : docs[d]) {
        if (w >= vocab_size_) throw ArgumentError("token id outside the vocabulary");
        words_.push_back(w);
      }
      doc_start_.push_back(words_.size());
    }

    word_topic_.assign(std::size_t{vocab_size_} * topics_, 0);
    doc_topic_.assign(docs.size() * topics_, 0);
    topic_totals_.assign(topics_, 0);
    assignment_.resize(words_.size());
    for (std::size_t d = 0; d + 1 < doc_start_.size(); ++d) {
      for (std::size_t i = doc_start_[d]; i < doc_start_[d + 1]; ++i) {
        const auto k = static_cast<std::uint32_t>(rng_.below(topics_));
        assignment_[i] = k;
        ++word_topic_[std::size_t{words_[i]} * topics_ + k];
        ++doc_topic_[d * topics_ + k];
        ++topic_totals_[k];
      }
    }
    weights_.resize(topics_);
  }

  void sweep() {
    const double vbeta = static_cast<double>(vocab_size_) * beta_;
    const std::uint32_t K = topics_;
    for (std::size_t d = 0; d + 1 < doc_start_.size(); ++d) {
      std::uint32_t* nd = &doc_topic_[d * K];
      for (std::size_t i = doc_start_[d]; i < doc_start_[d + 1]; ++i) {
        std::uint32_t* nw = &word_topic_[std::size_t{words_[i]} * K];
        std::uint32_t k = assignment_[i];
        --nd[k];
        --nw[k];
        --topic_totals_[k];

        double total = 0.0;
        for (std::uint32_t t = 0; t < K; ++t) {
          total += collapsed_gibbs_weight(nd[t], nw[t], topic_totals_[t], alpha_, beta_, vbeta);
          weights_[t] = total;
        }
        k = draw(total);

        assignment_[i] = k;
        ++nd[k];
        ++nw[k];
        ++topic_totals_[k];
      }
    }
    ++sweeps_;
  }

  /// log p(w, z) with theta and phi integrated out.
  double log_likelihood() const {
    const double K = topics_;
    const double V = vocab_size_;
    double ll = 0.0;
    const double lg_beta = std::lgamma(beta_);
    for (std::uint32_t k = 0; k < topics_; ++k) {
      ll += std::lgamma(V * beta_) - std::lgamma(topic_totals_[k] + V * beta_);
      for (std::uint32_t w = 0; w < vocab_size_; ++w)
        ll += std::lgamma(word_topic_[std::size_t{w} * topics_ + k] + beta_) - lg_beta;
    }
    const double lg_alpha = std::lgamma(alpha_);
    for (std::size_t d = 0; d + 1 < doc_start_.size(); ++d) {
      const double n = static_cast<double>(doc_start_[d + 1] - doc_start_[d]);
      ll += std::lgamma(K * alpha_) - std::lgamma(n + K * alpha_);
      for (std::uint32_t k = 0; k < topics_; ++k)
        ll += std::lgamma(doc_topic_[d * topics_ + k] + alpha_) - lg_alpha;
    }
    return ll;
  }

  std::uint32_t topics() const { return topics_; }
  std::uint32_t vocab_size() const { return vocab_size_; }
  std::size_t documents() const { return doc_start_.size() - 1; }
  std::size_t tokens() const { return words_.size(); }
  std::uint32_t sweeps() const { return sweeps_; }

  std::uint32_t topic_word_count(std::uint32_t k, WordId w) const {
    return word_topic_[std::size_t{w} * topics_ + k];
  }
  std::span<const std::uint32_t> doc_topic(std::size_t d) const {
    return {doc_topic_.data() + d * topics_, topics_};
  }
  std::size_t doc_length(std::size_t d) const { return doc_start_[d + 1] - doc_start_[d]; }
  std::span<const std::uint32_t> topic_totals() const { return topic_totals_; }
  std::span<const std::uint32_t> assignments(std::size_t d) const {
    return {assignment_.data() + doc_start_[d], doc_length(d)};
  }

  TopicModel model(std::uint64_t vocab_checksum = 0,
                   std::uint64_t preprocess_fingerprint = 0) const {
    std::vector<std::uint32_t> kw(std::size_t{topics_} * vocab_size_);
    for (std::uint32_t k = 0; k < topics_; ++k)
      for (std::uint32_t w = 0; w < vocab_size_; ++w)
        kw[std::size_t{k} * vocab_size_ + w] = word_topic_[std::size_t{w} * topics_ + k];
    return TopicModel(topics_, vocab_size_, alpha_, beta_, std::move(kw), sweeps_, seed_,
                      vocab_checksum, preprocess_fingerprint);
  }

 private:
  std::uint32_t draw(double total) {
    const double u = rng_.uniform() * total;
    for (std::uint32_t t = 0; t + 1 < topics_; ++t)
      if (u < weights_[t]) return t;
    return topics_ - 1;
  }

  std::uint32_t topics_;
  std::uint32_t vocab_size_;
  double alpha_;
  double beta_;
  std::uint64_t seed_;
  Rng rng_;
  std::vector<WordId> words_;
  std::vector<std::size_t> doc_start_;
  std::vector<std::uint32_t> assignment_;
  std::vector<std::uint32_t> word_topic_;  // V x K
  std::vector<std::uint32_t> doc_topic_;   // D x K
  std::vector<std::uint32_t> topic_totals_;
  std::vector<double> weights_;
  std::uint32_t sweeps_ = 0;
};

using SweepObserver = std::function<void(const GibbsSampler&)>;

inline TopicModel train_lda(std::span<const std::vector<WordId>> docs, std::uint32_t vocab_size,
                            const LdaParams& params, const SweepObserver& observer = {},
                            std::uint64_t vocab_checksum = 0,
                            std::uint64_t preprocess_fingerprint = 0) {
  if (params.iterations < 1) throw ArgumentError("iterations must be >= 1");
  GibbsSampler sampler(docs, vocab_size, params);
  for (std::uint32_t it = 0; it < params.iterations; ++it) {
    sampler.sweep();
    if (observer) observer(sampler);
  }
  return sampler.model(vocab_checksum, preprocess_fingerprint);
}

inline TopicModel train_lda(std::span<const TokenizedDocument> docs, const Vocabulary& vocab,
                            const LdaParams& params, const SweepObserver& observer = {},
                            std::uint64_t preprocess_fingerprint = 0) {
  std::vector<std::vector<WordId>> token_lists;
  token_lists.reserve(docs.size());
  for (const auto& d : docs) token_lists.push_back(d.tokens);
  return train_lda(token_lists, static_cast<std::uint32_t>(vocab.size()), params, observer,
                   vocab.checksum(), preprocess_fingerprint);
}

struct InferenceParams {
  std::uint32_t iterations = 100;
  std::uint32_t burn_in = 50;
  // Average the per-sweep estimate after burn-in instead of using the
  // final sweep's counts.
  bool average_samples = false;
};

/// Fold-in: samples topic assignments for an unseen document with the
/// model's topic-word counts held fixed, then returns
///   theta_k = (m_k + alpha) / (N + K alpha)
/// from the final sweep's document counts m. Throws UndefinedProfile for a
/// document without tokens. Never touches the model.
inline TopicDistribution infer_theta(const TopicModel& model, std::span<const WordId> doc,
                                     const InferenceParams& params, std::uint64_t seed) {
  if (doc.empty()) throw UndefinedProfile("document has no in-vocabulary tokens");
  if (params.iterations < 1) throw ArgumentError("inference iterations must be >= 1");
  const std::uint32_t K = model.topics();
  for (WordId w : doc)
    if (w >= model.vocab_size()) throw ArgumentError("token id outside the vocabulary");

  Rng rng(seed);
  std::vector<std::uint32_t> z(doc.size());
  std::vector<std::uint32_t> m(K, 0);
  for (std::size_t i = 0; i < doc.size(); ++i) {
    z[i] = static_cast<std::uint32_t>(rng.below(K));
    ++m[z[i]];
  }

  const double alpha = model.alpha();
  const double denom = static_cast<double>(doc.size()) + K * alpha;
  std::vector<double> cumulative(K);
  TopicDistribution sum(K, 0.0);
  std::uint32_t samples = 0;
  for (std::uint32_t it = 0; it < params.iterations; ++it) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      --m[z[i]];
      const auto phi = model.phi_of_word(doc[i]);
      double total = 0.0;
      for (std::uint32_t t = 0; t < K; ++t) {
        total += (m[t] + alpha) * phi[t];
        cumulative[t] = total;
      }
      const double u = rng.uniform() * total;
      std::uint32_t k = K - 1;
      for (std::uint32_t t = 0; t + 1 < K; ++t) {
        if (u < cumulative[t]) {
          k = t;
          break;
        }
      }
      z[i] = k;
      ++m[k];
    }
    if (params.average_samples && it >= params.burn_in) {
      for (std::uint32_t t = 0; t < K; ++t) sum[t] += (m[t] + alpha) / denom;
      ++samples;
    }
  }

  TopicDistribution theta(K);
  if (params.average_samples && samples > 0) {
    for (std::uint32_t t = 0; t < K; ++t) theta[t] = sum[t] / samples;
  } else {
    for (std::uint32_t t = 0; t < K; ++t) theta[t] = (m[t] + alpha) / denom;
  }
  return theta;
}

struct WordProbability {
  WordId word;
  double probability;
};

/// The n most probable words of a topic under phi, descending, ties by
/// word id. n is clamped to V.
inline std::vector<WordProbability> top_words(const TopicModel& model, std::uint32_t topic,
                                              std::size_t n) {
  if (topic >= model.topics())
    throw ArgumentError("topic " + std::to_string(topic) + " out of range [0, " +
                        std::to_string(model.topics()) + ")");
  if (n < 1) throw ArgumentError("n must be >= 1");
  std::vector<WordProbability> all(model.vocab_size());
  for (WordId w = 0; w < model.vocab_size(); ++w) all[w] = {w, model.phi(topic, w)};
  n = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                    [](const WordProbability& a, const WordProbability& b) {
                      if (a.probability != b.probability) return a.probability > b.probability;
                      return a.word < b.word;
                    });
  all.resize(n);
  return all;
}

// --- model container -------------------------------------------------------
//
// Layout:
//   "REVREC-LDA-1\n"            13-byte versioned magic
//   u64 LE                      header length in bytes
//   JSON header                 K, V, alpha, beta, iterations_run, seed, ...
//   u32 LE x K*V                topic-word counts, row-major
//   u32 LE x K                  topic totals

inline constexpr std::string_view kModelMagic = "REVREC-LDA-1\n";

namespace detail {

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

inline std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16) throw FormatError("bad 64-bit hex field in model header");
  std::uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else throw FormatError("bad 64-bit hex field in model header");
  }
  return v;
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_le(std::istream& in, int bytes) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), bytes);
  if (in.gcount() != bytes) throw FormatError("model file is truncated");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace detail

inline nlohmann::ordered_json model_header(const TopicModel& m) {
  nlohmann::ordered_json h;
  h["format"] = "revrec-lda";
  h["version"] = 1;
  h["K"] = m.topics();
  h["V"] = m.vocab_size();
  h["alpha"] = m.alpha();
  h["beta"] = m.beta();
  h["iterations_run"] = m.iterations_run();
  h["seed"] = m.seed();
  h["vocab_checksum"] = detail::hex64(m.vocab_checksum());
  h["preprocess_fingerprint"] = detail::hex64(m.preprocess_fingerprint());
  return h;
}

inline void save_model(const TopicModel& m, std::ostream& out) {
  const std::string header = model_header(m).dump();
  out.write(kModelMagic.data(), static_cast<std::streamsize>(kModelMagic.size()));
  detail::put_u64(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (auto v : m.topic_word()) detail::put_u32(out, v);
  for (auto v : m.topic_totals()) detail::put_u32(out, v);
  if (!out) throw IoError("failed to write model");
}

inline TopicModel load_model(std::istream& in) {
  std::string magic(kModelMagic.size(), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kModelMagic)
    throw FormatError("not a revrec LDA model (bad magic)");
  const auto len = detail::get_le(in, 8);
  if (len > (1u << 24)) throw FormatError("model header is implausibly large");
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (in.gcount() != static_cast<std::streamsize>(len)) throw FormatError("model file is truncated");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const std::exception& e) {
    throw FormatError(std::string("model header is not valid JSON: ") + e.what());
  }
  try {
    const auto K = h.at("K").get<std::uint32_t>();
    const auto V = h.at("V").get<std::uint32_t>();
    if (K == 0 || V == 0) throw FormatError("model header has K or V = 0");
    std::vector<std::uint32_t> kw(std::size_t{K} * V);
    for (auto& v : kw) v = static_cast<std::uint32_t>(detail::get_le(in, 4));
    std::vector<std::uint32_t> totals(K);
    for (auto& v : totals) v = static_cast<std::uint32_t>(detail::get_le(in, 4));
    std::uint64_t fingerprint = 0;
    if (h.contains("preprocess_fingerprint"))
      fingerprint = detail::parse_hex64(h["preprocess_fingerprint"].get<std::string>());
    TopicModel model(K, V, h.at("alpha").get<double>(), h.at("beta").get<double>(),
                     std::move(kw), h.at("iterations_run").get<std::uint32_t>(),
                     h.at("seed").get<std::uint64_t>(),
                     detail::parse_hex64(h.at("vocab_checksum").get<std::string>()), fingerprint);
    if (model.topic_totals() != totals)
      throw FormatError("model topic totals disagree with the topic-word matrix");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model header is missing a field: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("model violates an invariant: ") + e.what());
  }
}

}  // namespace revrec

#endif  // REVREC_LDA_HPP_

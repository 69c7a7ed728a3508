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

#ifndef REVREC_TEXT_HPP_
#define REVREC_TEXT_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "revrec/errors.hpp"
#include "revrec/porter_stemmer.hpp"
#include "revrec/random.hpp"
#include "revrec/stopwords.hpp"

namespace revrec {

struct PreprocessConfig {
  std::size_t min_token_len = 2;
  // Empty means the built-in English list.
  std::vector<std::string> stopwords;
  bool drop_stopwords = true;
};

/// Text normalizer: lowercase, strip non-letters, split, drop stopwords,
/// Porter-stem, drop short tokens.
///
/// Letters are ASCII a-z. Apostrophes (ASCII and U+2019) are deleted so
/// contractions stay one token; every other non-letter byte, including
/// UTF-8 multibyte sequences, separates tokens.
class Preprocessor {
 public:
  Preprocessor() : Preprocessor(PreprocessConfig{}) {}

  explicit Preprocessor(const PreprocessConfig& cfg)
      : min_token_len_(cfg.min_token_len) {
    if (!cfg.drop_stopwords) {
      // keep every word
    } else if (cfg.stopwords.empty()) {
      for (auto w : kDefaultStopwords) stopwords_.emplace(w);
    } else {
      for (const auto& w : cfg.stopwords) {
        auto n = normalize_word(w);
        if (!n.empty()) stopwords_.insert(std::move(n));
      }
    }
  }

  std::vector<std::string> operator()(std::string_view text) const {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
      if (word.empty()) return;
      if (!stopwords_.count(word)) {
        auto stem = stemmer_(word);
        if (stem.size() >= min_token_len_) out.push_back(std::move(stem));
      }
      word.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
      const auto c = static_cast<unsigned char>(text[i]);
      if (c >= 'A' && c <= 'Z') {
        word.push_back(static_cast<char>(c - 'A' + 'a'));
      } else if (c >= 'a' && c <= 'z') {
        word.push_back(static_cast<char>(c));
      } else if (c == '\'') {
        // deleted, joins the contraction
      } else if (c == 0xE2 && i + 2 < text.size() &&
                 static_cast<unsigned char>(text[i + 1]) == 0x80 &&
                 static_cast<unsigned char>(text[i + 2]) == 0x99) {
        i += 2;  // U+2019
      } else {
        flush();
      }
    }
    flush();
    return out;
  }

  std::size_t min_token_len() const { return min_token_len_; }

  bool is_stopword(std::string_view w) const {
    return stopwords_.count(std::string(w)) > 0;
  }

  // Order-independent fingerprint of the configuration; stored in model
  // headers so profiles are built with the pipeline the model was trained on.
  std::uint64_t fingerprint() const {
    std::vector<std::string> sorted(stopwords_.begin(), stopwords_.end());
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t h = fnv1a64(std::to_string(min_token_len_));
    for (const auto& w : sorted) h = fnv1a64(w + "\n", h);
    return h;
  }

 private:
  static std::string normalize_word(std::string_view w) {
    std::string n;
    for (char ch : w) {
      const auto c = static_cast<unsigned char>(ch);
      if (c >= 'A' && c <= 'Z') n.push_back(static_cast<char>(c - 'A' + 'a'));
      else if (c >= 'a' && c <= 'z') n.push_back(static_cast<char>(c));
    }
    return n;
  }

  std::size_t min_token_len_;
  std::unordered_set<std::string> stopwords_;
  PorterStemmer stemmer_;
};

// One word per line; blank lines and lines starting with '#' are skipped.
inline std::vector<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopwords file: " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.push_back(line);
  }
  if (words.empty()) throw FormatError("stopwords file is empty: " + path);
  return words;
}

}  // namespace revrec

#endif  // REVREC_TEXT_HPP_

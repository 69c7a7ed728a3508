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

#ifndef REVREC_CORPUS_HPP_
#define REVREC_CORPUS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "revrec/errors.hpp"
#include "revrec/parallel.hpp"
#include "revrec/random.hpp"
#include "revrec/text.hpp"

namespace revrec {

using WordId = std::uint32_t;

struct ReviewRecord {
  std::string review_id;
  std::string user_id;
  std::string movie_id;
  std::optional<int> rating;  // 1..10
  std::string text;
  std::optional<std::string> timestamp;  // ISO-8601
};

enum class AuxSource { tweet, other };

struct AuxDocument {
  std::string movie_id;
  std::string text;
  AuxSource source = AuxSource::other;
};

struct ParseStats {
  std::size_t lines = 0;      // non-blank lines seen
  std::size_t records = 0;
  std::size_t malformed = 0;  // skipped, includes duplicate review ids
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  ParseStats stats;
  // Up to a handful of "line N: reason" messages.
  std::vector<std::string> diagnostics;
};

namespace detail {

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

inline bool looks_like_iso8601(std::string_view s) {
  if (s.size() < 10) return false;
  auto digit = [&](std::size_t i) { return s[i] >= '0' && s[i] <= '9'; };
  return digit(0) && digit(1) && digit(2) && digit(3) && s[4] == '-' &&
         digit(5) && digit(6) && s[7] == '-' && digit(8) && digit(9);
}

inline std::string required_id(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw std::invalid_argument(std::string("missing string field '") + key + "'");
  auto v = it->get<std::string>();
  if (v.empty()) throw std::invalid_argument(std::string("empty '") + key + "'");
  return v;
}

inline std::string required_text(const nlohmann::json& j) {
  auto it = j.find("text");
  if (it == j.end() || !it->is_string())
    throw std::invalid_argument("missing string field 'text'");
  return it->get<std::string>();
}

inline ReviewRecord review_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("not a JSON object");
  ReviewRecord r;
  r.review_id = required_id(j, "review_id");
  r.user_id = required_id(j, "user_id");
  r.movie_id = required_id(j, "movie_id");
  r.text = required_text(j);
  if (auto it = j.find("rating"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() && !it->is_number_unsigned())
      throw std::invalid_argument("rating is not an integer");
    const auto v = it->get<long long>();
    if (v < 1 || v > 10) throw std::invalid_argument("rating outside 1..10");
    r.rating = static_cast<int>(v);
  }
  if (auto it = j.find("timestamp"); it != j.end() && !it->is_null()) {
    if (!it->is_string() || !looks_like_iso8601(it->get_ref<const std::string&>()))
      throw std::invalid_argument("timestamp is not ISO-8601");
    r.timestamp = it->get<std::string>();
  }
  return r;
}

inline AuxDocument aux_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("not a JSON object");
  AuxDocument d;
  d.movie_id = required_id(j, "movie_id");
  d.text = required_text(j);
  if (auto it = j.find("source"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw std::invalid_argument("source is not a string");
    const auto& s = it->get_ref<const std::string&>();
    if (s == "tweet") d.source = AuxSource::tweet;
    else if (s == "other") d.source = AuxSource::other;
    else throw std::invalid_argument("unknown source '" + s + "'");
  }
  return d;
}

template <typename Record, typename Convert>
ParseResult<Record> parse_jsonl(std::istream& in, unsigned threads, Convert convert,
                                const char* what) {
  if (!in) throw IoError(std::string("unreadable ") + what + " stream");
  std::vector<std::string> lines;
  std::vector<std::size_t> line_no;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (is_blank(line)) continue;
    lines.push_back(std::move(line));
    line_no.push_back(n);
  }
  if (in.bad()) throw IoError(std::string("I/O error while reading ") + what);

  std::vector<std::optional<Record>> parsed(lines.size());
  std::vector<std::string> errors(lines.size());
  parallel_for(lines.size(), threads, [&](std::size_t i) {
    try {
      parsed[i] = convert(nlohmann::json::parse(lines[i]));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  ParseResult<Record> result;
  result.stats.lines = lines.size();
  auto note = [&](std::size_t i, const std::string& why) {
    ++result.stats.malformed;
    if (result.diagnostics.size() < 10)
      result.diagnostics.push_back("line " + std::to_string(line_no[i]) + ": " + why);
  };
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (!parsed[i]) {
      note(i, errors[i]);
      continue;
    }
    result.records.push_back(std::move(*parsed[i]));
  }
  result.stats.records = result.records.size();
  return result;
}

inline void check_malformed_ratio(const ParseStats& s, const char* what) {
  if (s.lines > 0 && 2 * s.malformed > s.lines)
    throw FormatError(std::string("more than half of the ") + what + " lines are malformed (" +
                      std::to_string(s.malformed) + " of " + std::to_string(s.lines) +
                      "); wrong input file?");
}

}  // namespace detail

/// Parses review JSON Lines. Malformed lines (bad JSON, missing or
/// mistyped fields, rating outside 1..10, duplicate review_id) are counted
/// and skipped; survivors keep file order. Unknown fields are ignored.
inline ParseResult<ReviewRecord> parse_reviews(std::istream& in, unsigned threads = 1) {
  auto result = detail::parse_jsonl<ReviewRecord>(in, threads, detail::review_from_json,
                                                  "reviews");
  // Duplicates are resolved in file order: the first occurrence wins.
  std::unordered_set<std::string> seen;
  seen.reserve(result.records.size());
  std::vector<ReviewRecord> unique;
  unique.reserve(result.records.size());
  for (auto& r : result.records) {
    if (!seen.insert(r.review_id).second) {
      ++result.stats.malformed;
      if (result.diagnostics.size() < 10)
        result.diagnostics.push_back("duplicate review_id '" + r.review_id + "'");
      continue;
    }
    unique.push_back(std::move(r));
  }
  result.records = std::move(unique);
  result.stats.records = result.records.size();
  detail::check_malformed_ratio(result.stats, "reviews");
  return result;
}

inline ParseResult<AuxDocument> parse_aux(std::istream& in, unsigned threads = 1) {
  auto result = detail::parse_jsonl<AuxDocument>(in, threads, detail::aux_from_json, "aux");
  detail::check_malformed_ratio(result.stats, "aux");
  return result;
}

inline nlohmann::json to_json(const ReviewRecord& r) {
  nlohmann::json j = {{"review_id", r.review_id},
                      {"user_id", r.user_id},
                      {"movie_id", r.movie_id}};
  if (r.rating) j["rating"] = *r.rating;
  j["text"] = r.text;
  if (r.timestamp) j["timestamp"] = *r.timestamp;
  return j;
}

inline nlohmann::json to_json(const AuxDocument& d) {
  return {{"movie_id", d.movie_id},
          {"text", d.text},
          {"source", d.source == AuxSource::tweet ? "tweet" : "other"}};
}

// Dense word <-> id mapping with document frequencies.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Entries in id order. Throws FormatError on duplicates or zero counts.
  explicit Vocabulary(std::vector<std::pair<std::string, std::uint32_t>> entries) {
    words_.reserve(entries.size());
    doc_freq_.reserve(entries.size());
    for (auto& [w, df] : entries) {
      if (w.empty()) throw FormatError("empty word in vocabulary");
      if (df < 1) throw FormatError("vocabulary word '" + w + "' has doc_freq 0");
      const auto id = static_cast<WordId>(words_.size());
      if (!id_of_.emplace(w, id).second)
        throw FormatError("duplicate vocabulary word '" + w + "'");
      words_.push_back(std::move(w));
      doc_freq_.push_back(df);
    }
  }

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint32_t doc_freq(WordId id) const { return doc_freq_.at(id); }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<WordId> id(std::string_view w) const {
    auto it = id_of_.find(std::string(w));
    if (it == id_of_.end()) return std::nullopt;
    return it->second;
  }

  // Text form: line i is "word<TAB>doc_freq" for id i.
  void save(std::ostream& out) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      out << words_[i] << '\t' << doc_freq_[i] << '\n';
  }

  std::string serialize() const {
    std::ostringstream os;
    save(os);
    return os.str();
  }

  std::uint64_t checksum() const { return fnv1a64(serialize()); }

  static Vocabulary load(std::istream& in) {
    std::vector<std::pair<std::string, std::uint32_t>> entries;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw FormatError("vocabulary line " + std::to_string(n) + " has no tab");
      std::uint32_t df = 0;
      try {
        std::size_t used = 0;
        const auto v = std::stoul(line.substr(tab + 1), &used);
        if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
        df = static_cast<std::uint32_t>(v);
      } catch (const std::exception&) {
        throw FormatError("vocabulary line " + std::to_string(n) + " has a bad count");
      }
      entries.emplace_back(line.substr(0, tab), df);
    }
    if (in.bad()) throw IoError("I/O error while reading vocabulary");
    return Vocabulary(std::move(entries));
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint32_t> doc_freq_;
  std::unordered_map<std::string, WordId> id_of_;
};

struct VocabularyConfig {
  std::uint32_t min_df = 5;
  double max_df_ratio = 0.5;
};

/// Keeps words with min_df <= df <= max_df_ratio * |docs|. Ids go by
/// descending document frequency, ties lexicographic.
inline Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs,
                                   const VocabularyConfig& cfg = {}) {
  if (cfg.min_df < 1) throw ConfigError("min_df must be >= 1");
  if (!(cfg.max_df_ratio > 0.0 && cfg.max_df_ratio <= 1.0))
    throw ConfigError("max_df_ratio must be in (0, 1]");
  if (docs.empty()) throw ArgumentError("cannot build a vocabulary from an empty corpus");

  std::unordered_map<std::string, std::uint32_t> df;
  std::unordered_set<std::string_view> in_doc;
  for (const auto& doc : docs) {
    in_doc.clear();
    for (const auto& w : doc)
      if (in_doc.insert(w).second) ++df[w];
  }
  const double max_df = cfg.max_df_ratio * static_cast<double>(docs.size());
  std::vector<std::pair<std::string, std::uint32_t>> kept;
  for (auto& [w, n] : df)
    if (n >= cfg.min_df && static_cast<double>(n) <= max_df) kept.emplace_back(w, n);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return Vocabulary(std::move(kept));
}

enum class EntityKind { review, user, movie };

inline const char* to_string(EntityKind k) {
  switch (k) {
    case EntityKind::review: return "review";
    case EntityKind::user: return "user";
    case EntityKind::movie: return "movie";
  }
  return "?";
}

struct TokenizedDocument {
  std::string doc_id;
  EntityKind entity = EntityKind::review;
  std::string entity_id;
  std::vector<WordId> tokens;

  // Documents with no in-vocabulary tokens are kept in listings but never
  // fed to the sampler.
  bool usable() const { return !tokens.empty(); }
};

enum class Grouping { per_review, per_user, per_movie };

inline Grouping parse_grouping(std::string_view s) {
  if (s == "per_review") return Grouping::per_review;
  if (s == "per_user") return Grouping::per_user;
  if (s == "per_movie") return Grouping::per_movie;
  throw ConfigError("unknown grouping '" + std::string(s) + "'");
}

inline std::vector<WordId> to_ids(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens)
    if (auto id = vocab.id(t)) ids.push_back(*id);
  return ids;
}

/// Groups per-review token streams into documents. `review_tokens[i]` must
/// be the preprocessed text of `reviews[i]`. per_user / per_movie documents
/// are emitted in entity-id order; each concatenates its reviews by
/// timestamp, record order breaking ties and standing in when timestamps
/// are absent. Out-of-vocabulary tokens are dropped.
inline std::vector<TokenizedDocument> assemble_documents(
    std::span<const ReviewRecord> reviews, std::span<const std::vector<std::string>> review_tokens,
    Grouping grouping, const Vocabulary& vocab) {
  if (reviews.size() != review_tokens.size())
    throw ArgumentError("reviews and token streams differ in length");
  std::vector<TokenizedDocument> docs;
  if (grouping == Grouping::per_review) {
    docs.reserve(reviews.size());
    for (std::size_t i = 0; i < reviews.size(); ++i)
      docs.push_back({reviews[i].review_id, EntityKind::review, reviews[i].review_id,
                      to_ids(review_tokens[i], vocab)});
    return docs;
  }
  if (grouping != Grouping::per_user && grouping != Grouping::per_movie)
    throw ConfigError("unknown grouping value");
  const bool by_user = grouping == Grouping::per_user;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < reviews.size(); ++i)
    groups[by_user ? reviews[i].user_id : reviews[i].movie_id].push_back(i);
  for (auto& [entity, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return reviews[a].timestamp.value_or("") < reviews[b].timestamp.value_or("");
    });
    TokenizedDocument d;
    d.entity = by_user ? EntityKind::user : EntityKind::movie;
    d.entity_id = entity;
    d.doc_id = std::string(to_string(d.entity)) + ":" + entity;
    for (auto i : idx) {
      auto ids = to_ids(review_tokens[i], vocab);
      d.tokens.insert(d.tokens.end(), ids.begin(), ids.end());
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

inline std::vector<TokenizedDocument> usable_documents(std::vector<TokenizedDocument> docs) {
  std::erase_if(docs, [](const TokenizedDocument& d) { return !d.usable(); });
  return docs;
}

inline std::vector<std::vector<std::string>> preprocess_all(std::span<const ReviewRecord> reviews,
                                                            const Preprocessor& pre,
                                                            unsigned threads = 1) {
  std::vector<std::vector<std::string>> out(reviews.size());
  parallel_for(reviews.size(), threads, [&](std::size_t i) { out[i] = pre(reviews[i].text); });
  return out;
}

/// Ingested reviews with their in-vocabulary token ids and per-entity
/// indexes (review positions in record order).
struct Dataset {
  std::vector<ReviewRecord> reviews;
  std::vector<std::vector<WordId>> tokens;
  std::map<std::string, std::vector<std::size_t>> by_user;
  std::map<std::string, std::vector<std::size_t>> by_movie;

  static Dataset build(std::vector<ReviewRecord> reviews, const Vocabulary& vocab,
                       const Preprocessor& pre, unsigned threads = 1) {
    Dataset ds;
    ds.reviews = std::move(reviews);
    ds.tokens.resize(ds.reviews.size());
    parallel_for(ds.reviews.size(), threads, [&](std::size_t i) {
      ds.tokens[i] = to_ids(pre(ds.reviews[i].text), vocab);
    });
    ds.reindex();
    return ds;
  }

  void reindex() {
    by_user.clear();
    by_movie.clear();
    for (std::size_t i = 0; i < reviews.size(); ++i) {
      by_user[reviews[i].user_id].push_back(i);
      by_movie[reviews[i].movie_id].push_back(i);
    }
  }
};

}  // namespace revrec

#endif  // REVREC_CORPUS_HPP_

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

// revrec: command-line front end.
//
//   revrec preprocess --reviews r.jsonl --out docs.jsonl
//   revrec train      --reviews r.jsonl --out model.bin
//   revrec profile    --reviews r.jsonl --model model.bin --out profiles.jsonl
//   revrec recommend  --profiles profiles.jsonl --user u1 --k 10
//   revrec evaluate   --reviews r.jsonl --model model.bin --out-dir eval/
//   revrec topwords   --model model.bin --topic 0 --n 9
//
// Exit status: 0 success, 1 recoverable data problem, 2 fatal error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "revrec/revrec.hpp"

namespace {

using namespace revrec;

constexpr int kExitRecoverable = 1;
constexpr int kExitFatal = 2;

// --- flat key=value configuration ----------------------------------------

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(n) + ": expected key=value");
    auto key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(n) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

CLI::Option* find_long(CLI::App* app, const std::string& name) {
  for (auto* opt : app->get_options())
    for (const auto& l : opt->get_lnames())
      if (l == name) return opt;
  return nullptr;
}

// Config values fill options the command line left unset (flags > config >
// defaults). Keys no subcommand knows are an error; keys belonging to
// another subcommand are ignored so one file can serve a whole experiment.
void apply_config(CLI::App& app, CLI::App* sub, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    bool known = find_long(&app, key) != nullptr;
    for (auto* s : app.get_subcommands({})) known = known || find_long(s, key) != nullptr;
    if (!known) throw ConfigError("unknown config key '" + key + "'");
    if (key == "config") continue;
    for (auto* scope : {sub, &app}) {
      auto* opt = find_long(scope, key);
      if (!opt) continue;
      if (opt->count() == 0) {
        if (opt->get_expected_max() > 1) {
          std::stringstream ss(value);
          std::string item;
          while (std::getline(ss, item, ',')) opt->add_result(item);
        } else {
          opt->add_result(value);
        }
        opt->run_callback();
      }
      break;
    }
  }
}

// Resolved option values of a subcommand, for provenance sidecars.
nlohmann::ordered_json resolved_config(CLI::App* sub) {
  nlohmann::ordered_json j;
  for (auto* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (name == "help" || name == "threads") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < r.size(); ++i) joined += (i ? "," : "") + r[i];
      j[name] = joined;
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

// --- shared settings ------------------------------------------------------

struct PreprocessFlags {
  std::string stopwords;
  std::size_t min_token_len = 2;

  void add(CLI::App* app) {
    app->add_option("--stopwords", stopwords, "Stopword file, one word per line (default: built-in English list)")
        ->check(CLI::ExistingFile);
    app->add_option("--min-token-len", min_token_len, "Drop stems shorter than this")
        ->check(CLI::PositiveNumber);
  }

  Preprocessor make() const {
    PreprocessConfig cfg;
    cfg.min_token_len = min_token_len;
    if (!stopwords.empty()) {
      cfg.stopwords = load_stopwords(stopwords);
      if (cfg.stopwords.empty()) throw ConfigError("stopword file " + stopwords + " is empty");
    }
    return Preprocessor(cfg);
  }
};

struct VocabFlags {
  std::uint32_t min_df = 5;
  double max_df_ratio = 0.5;
  std::string grouping = "per_review";

  void add(CLI::App* app) {
    app->add_option("--min-df", min_df, "Minimum document frequency kept in the vocabulary");
    app->add_option("--max-df-ratio", max_df_ratio, "Maximum document frequency as a fraction of documents");
    app->add_option("--grouping", grouping, "Training documents: per_review, per_user or per_movie")
        ->check(CLI::IsMember({"per_review", "per_user", "per_movie"}));
  }
};

struct ProfileFlags {
  ColdPolicy cold;
  std::size_t cf_k = 20;
  std::uint32_t aux_weight = 1;
  bool no_rating_weighting = false;
  std::uint32_t infer_iterations = 100;
  std::uint32_t infer_burn_in = 50;
  bool average_samples = false;

  void add(CLI::App* app) {
    app->add_option("--min-user-reviews", cold.min_user_reviews, "Users with fewer reviews are cold");
    app->add_option("--min-user-tokens", cold.min_user_tokens, "Users with fewer in-vocabulary tokens are cold");
    app->add_option("--min-movie-reviews", cold.min_movie_reviews, "Movies with fewer reviews are cold");
    app->add_option("--cf-k", cf_k, "Neighbors used to fill cold user profiles")->check(CLI::PositiveNumber);
    app->add_option("--aux-weight", aux_weight, "Repetitions of each auxiliary document for cold movies")
        ->check(CLI::PositiveNumber);
    app->add_flag("--no-rating-weighting", no_rating_weighting,
                  "Count every user review once regardless of rating");
    app->add_option("--infer-iterations", infer_iterations, "Fold-in sweeps per profile")
        ->check(CLI::PositiveNumber);
    app->add_option("--infer-burn-in", infer_burn_in, "Fold-in sweeps discarded before averaging");
    app->add_flag("--average-samples", average_samples, "Average theta over post-burn-in fold-in sweeps");
  }

  ProfileSettings settings(std::uint64_t seed, unsigned threads) const {
    ProfileSettings s;
    s.profile.inference = {infer_iterations, infer_burn_in, average_samples};
    s.profile.rating_weighting = !no_rating_weighting;
    s.cold = cold;
    s.cold.validate();
    s.cf_k = cf_k;
    s.aux_weight = aux_weight;
    s.seed = seed;
    s.threads = threads;
    return s;
  }
};

std::vector<ReviewRecord> load_reviews(const std::string& path, unsigned threads) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reviews file " + path);
  auto parsed = parse_reviews(in, threads);
  std::size_t shown = 0;
  for (const auto& d : parsed.diagnostics)
    if (shown++ < 20) std::cerr << "warning: " << path << ": " << d << '\n';
  std::cerr << "reviews: " << parsed.stats.records << " records, " << parsed.stats.malformed
            << " malformed of " << parsed.stats.lines << " lines\n";
  return std::move(parsed.records);
}

std::vector<AuxDocument> load_aux(const std::string& path, unsigned threads) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw IoError("cannot open aux file " + path);
  auto parsed = parse_aux(in, threads);
  for (const auto& d : parsed.diagnostics) std::cerr << "warning: " << path << ": " << d << '\n';
  return std::move(parsed.records);
}

std::string vocab_path_for(const std::string& model_path, const std::string& explicit_path) {
  return explicit_path.empty() ? model_path + ".vocab.tsv" : explicit_path;
}

struct LoadedModel {
  TopicModel model;
  Vocabulary vocab;
  std::string vocab_path;
};

LoadedModel load_model_files(const std::string& model_path, const std::string& vocab_flag) {
  LoadedModel lm;
  {
    std::ifstream in(model_path, std::ios::binary);
    if (!in) throw IoError("cannot open model file " + model_path);
    lm.model = load_model(in);
  }
  lm.vocab_path = vocab_path_for(model_path, vocab_flag);
  std::ifstream in(lm.vocab_path);
  if (!in) throw IoError("cannot open vocabulary file " + lm.vocab_path);
  lm.vocab = Vocabulary::load(in);
  if (lm.vocab.size() != lm.model.vocab_size() || lm.vocab.checksum() != lm.model.vocab_checksum())
    throw FormatError("vocabulary " + lm.vocab_path + " does not match model " + model_path);
  return lm;
}

void check_fingerprint(const TopicModel& model, const Preprocessor& pre) {
  if (model.preprocess_fingerprint() != 0 && model.preprocess_fingerprint() != pre.fingerprint())
    throw ConfigError(
        "preprocessing settings (stopwords, min-token-len) differ from those the model was trained with");
}

void write_output(const std::string& path, const std::string& bytes) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  write_file(path, bytes);
}

// --- subcommands ------------------------------------------------------------

struct Global {
  std::string config;
  unsigned threads = 1;
};

struct PreprocessCmd {
  std::string reviews, aux, out, vocab_out;
  PreprocessFlags pre;
  VocabFlags vocab;

  void add(CLI::App* app) {
    app->add_option("--reviews", reviews, "Reviews JSONL")->check(CLI::ExistingFile);
    app->add_option("--aux", aux, "Auxiliary documents JSONL (validated only)")->check(CLI::ExistingFile);
    app->add_option("--out", out, "Tokenized documents JSONL to write");
    app->add_option("--vocab-out", vocab_out, "Vocabulary file (default: <out>.vocab.tsv)");
    pre.add(app);
    vocab.add(app);
  }

  int run(CLI::App* sub, const Global& g) {
    if (reviews.empty() || out.empty()) throw ConfigError("preprocess needs --reviews and --out");
    const auto records = load_reviews(reviews, g.threads);
    load_aux(aux, g.threads);
    const auto p = pre.make();
    const auto tokens = preprocess_all(records, p, g.threads);
    const auto v = build_vocabulary(tokens, {vocab.min_df, vocab.max_df_ratio});
    const auto docs = assemble_documents(records, tokens, parse_grouping(vocab.grouping), v);
    std::string body;
    std::size_t usable = 0;
    for (const auto& d : docs) {
      nlohmann::ordered_json j;
      j["doc_id"] = d.doc_id;
      j["entity_kind"] = to_string(d.entity);
      j["entity_id"] = d.entity_id;
      j["tokens"] = d.tokens;
      body += j.dump() + '\n';
      usable += d.usable();
    }
    const auto vpath = vocab_out.empty() ? out + ".vocab.tsv" : vocab_out;
    write_output(out, body);
    write_output(vpath, v.serialize());
    write_provenance(out, "preprocess", resolved_config(sub), {reviews, aux, pre.stopwords});
    std::cerr << "documents: " << docs.size() << " (" << docs.size() - usable
              << " without in-vocabulary tokens), vocabulary: " << v.size() << " words\n";
    return 0;
  }
};

struct TrainCmd {
  std::string reviews, out;
  PreprocessFlags pre;
  VocabFlags vocab;
  std::uint32_t topics = 50;
  std::uint32_t iterations = 1000;
  std::optional<double> alpha;
  double beta = 0.1;
  std::uint64_t seed = 0;
  std::uint32_t log_every = 0;

  void add(CLI::App* app) {
    app->add_option("--reviews", reviews, "Reviews JSONL")->check(CLI::ExistingFile);
    app->add_option("--out", out, "Model file to write; vocabulary goes to <out>.vocab.tsv");
    app->add_option("--topics", topics, "Number of topics K")->check(CLI::PositiveNumber);
    app->add_option("--iterations", iterations, "Gibbs sweeps")->check(CLI::PositiveNumber);
    app->add_option("--alpha", alpha, "Document-topic prior (default: 50/K)");
    app->add_option("--beta", beta, "Topic-word prior");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--log-every", log_every, "Report log-likelihood every N sweeps (0: never)");
    pre.add(app);
    vocab.add(app);
  }

  int run(CLI::App* sub, const Global& g) {
    if (reviews.empty() || out.empty()) throw ConfigError("train needs --reviews and --out");
    const auto records = load_reviews(reviews, g.threads);
    const auto p = pre.make();
    const auto tokens = preprocess_all(records, p, g.threads);
    const auto v = build_vocabulary(tokens, {vocab.min_df, vocab.max_df_ratio});
    const auto docs =
        usable_documents(assemble_documents(records, tokens, parse_grouping(vocab.grouping), v));
    if (docs.empty()) throw ConfigError("no document has in-vocabulary tokens; lower --min-df");

    LdaParams params;
    params.topics = topics;
    params.iterations = iterations;
    params.alpha = alpha;
    params.beta = beta;
    params.seed = seed;
    SweepObserver observer;
    if (log_every > 0)
      observer = [&](const GibbsSampler& s) {
        if (s.sweeps() % log_every == 0)
          std::cerr << "sweep " << s.sweeps() << " log-likelihood " << s.log_likelihood() << '\n';
      };
    std::cerr << "training K=" << topics << " on " << docs.size() << " documents, V=" << v.size()
              << ", " << iterations << " sweeps\n";
    const auto model = train_lda(docs, v, params, observer, p.fingerprint());

    std::ostringstream bytes;
    save_model(model, bytes);
    write_output(out, bytes.str());
    write_output(out + ".vocab.tsv", v.serialize());
    auto cfg = resolved_config(sub);
    cfg["alpha"] = model.alpha();
    write_provenance(out, "train", cfg, {reviews, pre.stopwords});
    return 0;
  }
};

struct ProfileCmd {
  std::string reviews, aux, model, vocab, out;
  PreprocessFlags pre;
  ProfileFlags prof;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--reviews", reviews, "Reviews JSONL")->check(CLI::ExistingFile);
    app->add_option("--aux", aux, "Auxiliary documents JSONL for cold movies")->check(CLI::ExistingFile);
    app->add_option("--model", model, "Trained model file")->check(CLI::ExistingFile);
    app->add_option("--vocab", vocab, "Vocabulary file (default: <model>.vocab.tsv)");
    app->add_option("--out", out, "Profiles JSONL to write");
    app->add_option("--seed", seed, "Random seed");
    pre.add(app);
    prof.add(app);
  }

  int run(CLI::App* sub, const Global& g) {
    if (reviews.empty() || model.empty() || out.empty())
      throw ConfigError("profile needs --reviews, --model and --out");
    const auto lm = load_model_files(model, vocab);
    const auto p = pre.make();
    check_fingerprint(lm.model, p);
    const auto ds = Dataset::build(load_reviews(reviews, g.threads), lm.vocab, p, g.threads);
    const auto aux_docs = load_aux(aux, g.threads);
    const auto set = build_all_profiles(ds, index_aux(aux_docs, lm.vocab, p), lm.model,
                                        prof.settings(seed, g.threads));
    std::ostringstream body;
    write_profiles(body, set.users);
    write_profiles(body, set.movies);
    write_output(out, body.str());
    write_provenance(out, "profile", resolved_config(sub), {reviews, aux, model, lm.vocab_path, pre.stopwords});
    std::cerr << "profiles: " << set.warm_users << " warm users, "
              << set.users.size() - set.warm_users << " cold users filled ("
              << set.cf_fallbacks << " unweighted), " << set.movies.size() << " movies\n";
    for (const auto& m : set.unrecommendable_movies)
      std::cerr << "warning: movie '" << m << "' is unrecommendable: no usable text\n";
    return 0;
  }
};

struct RecommendCmd {
  std::string profiles, user, reviews, out;
  std::size_t k = 10;
  std::string metric = "kl";
  std::string kl_direction = "user_movie";

  void add(CLI::App* app) {
    app->add_option("--profiles", profiles, "Profiles JSONL")->check(CLI::ExistingFile);
    app->add_option("--user", user, "User id");
    app->add_option("--k", k, "List length")->check(CLI::PositiveNumber);
    app->add_option("--metric", metric, "kl or cosine")->check(CLI::IsMember({"kl", "cosine"}));
    app->add_option("--kl-direction", kl_direction, "user_movie, movie_user or js")
        ->check(CLI::IsMember({"user_movie", "movie_user", "js"}));
    app->add_option("--reviews", reviews, "Reviews JSONL; movies the user reviewed are excluded")
        ->check(CLI::ExistingFile);
    app->add_option("--out", out, "Write the ranked list here instead of stdout");
  }

  int run(CLI::App* sub, const Global& g) {
    if (profiles.empty() || user.empty()) throw ConfigError("recommend needs --profiles and --user");
    std::ifstream in(profiles);
    if (!in) throw IoError("cannot open profiles file " + profiles);
    const auto all = read_profiles(in);
    std::optional<PreferenceProfile> target;
    std::vector<PreferenceProfile> movies;
    for (const auto& p : all) {
      if (p.kind == EntityKind::user && p.entity_id == user) target = p;
      if (p.kind == EntityKind::movie) movies.push_back(p);
    }
    if (!target) throw ColdUser("cold user: no profile");
    std::unordered_set<std::string> exclusions;
    if (!reviews.empty())
      for (const auto& r : load_reviews(reviews, g.threads))
        if (r.user_id == user) exclusions.insert(r.movie_id);
    const auto list = recommend_top_k(*target, movies, k,
                                      {parse_metric(metric), parse_kl_direction(kl_direction)},
                                      exclusions);
    const auto text = to_json(list).dump() + '\n';
    if (out.empty()) {
      std::cout << text;
    } else {
      write_output(out, text);
      write_provenance(out, "recommend", resolved_config(sub), {profiles, reviews});
    }
    return 0;
  }
};

struct EvaluateCmd {
  std::string reviews, aux, model, vocab, out_dir = ".";
  PreprocessFlags pre;
  ProfileFlags prof;
  EvalConfig eval;
  std::string metric = "kl";
  std::string kl_direction = "user_movie";
  bool random_scorer = false;

  void add(CLI::App* app) {
    app->add_option("--reviews", reviews, "Reviews JSONL")->check(CLI::ExistingFile);
    app->add_option("--aux", aux, "Auxiliary documents JSONL for cold movies")->check(CLI::ExistingFile);
    app->add_option("--model", model, "Trained model file")->check(CLI::ExistingFile);
    app->add_option("--vocab", vocab, "Vocabulary file (default: <model>.vocab.tsv)");
    app->add_option("--out-dir", out_dir, "Directory for report.json, report.csv, rank_histogram.tsv");
    app->add_option("--n-test-users", eval.n_test_users, "Most active qualifying users evaluated");
    app->add_option("--positive-min", eval.positive_rating_min, "Lowest rating counted as positive");
    app->add_option("--completeness", eval.completeness_levels, "Profile completeness levels")
        ->delimiter(',');
    app->add_option("--cutoffs", eval.cutoffs, "Hit-rate cutoffs K, ascending")->delimiter(',');
    app->add_option("--targets-per-user", eval.targets_per_user,
                    "Held-out targets sampled per user (0: every positively rated movie)");
    app->add_option("--metric", metric, "kl or cosine")->check(CLI::IsMember({"kl", "cosine"}));
    app->add_option("--kl-direction", kl_direction, "user_movie, movie_user or js")
        ->check(CLI::IsMember({"user_movie", "movie_user", "js"}));
    app->add_flag("--random-scorer", random_scorer, "Replace model scores by seeded uniform draws");
    app->add_option("--seed", eval.seed, "Random seed");
    pre.add(app);
    prof.add(app);
  }

  int run(CLI::App* sub, const Global& g) {
    if (reviews.empty() || model.empty()) throw ConfigError("evaluate needs --reviews and --model");
    eval.recommend = {parse_metric(metric), parse_kl_direction(kl_direction)};
    eval.scoring = random_scorer ? Scoring::random : Scoring::model;
    eval.validate();
    const auto lm = load_model_files(model, vocab);
    const auto p = pre.make();
    check_fingerprint(lm.model, p);
    const auto ds = Dataset::build(load_reviews(reviews, g.threads), lm.vocab, p, g.threads);
    const auto aux_index = index_aux(load_aux(aux, g.threads), lm.vocab, p);
    EvalContext ctx{ds, lm.model, aux_index, prof.settings(eval.seed, g.threads)};

    const auto selection = select_test_users(ds, eval);
    if (selection.short_of_request)
      std::cerr << "warning: only " << selection.qualifying << " qualifying users (requested "
                << eval.n_test_users << ")\n";
    const auto report = leave_one_out_eval(ctx, eval);

    std::filesystem::create_directories(out_dir);
    const auto base = std::filesystem::path(out_dir);
    const auto json_path = (base / "report.json").string();
    write_output(json_path, to_json(report).dump(2) + '\n');
    std::ostringstream csv, tsv;
    write_report_csv(csv, report);
    write_rank_histogram_tsv(tsv, report);
    write_output((base / "report.csv").string(), csv.str());
    write_output((base / "rank_histogram.tsv").string(), tsv.str());
    write_provenance(json_path, "evaluate", resolved_config(sub),
                     {reviews, aux, model, lm.vocab_path, pre.stopwords});
    std::cout << csv.str();
    std::cerr << "evaluated " << report.users_evaluated << " users, " << report.unrankable_trials
              << " unrankable trials, " << report.leakage_violations << " leakage violations\n";
    return report.leakage_violations == 0 ? 0 : kExitFatal;
  }
};

struct TopwordsCmd {
  std::string model, vocab;
  std::optional<std::uint32_t> topic;
  std::size_t n = 10;

  void add(CLI::App* app) {
    app->add_option("--model", model, "Trained model file")->check(CLI::ExistingFile);
    app->add_option("--vocab", vocab, "Vocabulary file (default: <model>.vocab.tsv)");
    app->add_option("--topic", topic, "Topic index (default: every topic)");
    app->add_option("--n", n, "Words per topic")->check(CLI::PositiveNumber);
  }

  int run(CLI::App*, const Global&) {
    if (model.empty()) throw ConfigError("topwords needs --model");
    const auto lm = load_model_files(model, vocab);
    if (topic && *topic >= lm.model.topics())
      throw ArgumentError("topic " + std::to_string(*topic) + " out of range (K=" +
                          std::to_string(lm.model.topics()) + ")");
    auto print_topic = [&](std::uint32_t k) {
      for (const auto& wp : top_words(lm.model, k, n))
        std::printf("%s %.5f\n", lm.vocab.word(wp.word).c_str(), wp.probability);
    };
    if (topic) {
      print_topic(*topic);
    } else {
      for (std::uint32_t k = 0; k < lm.model.topics(); ++k) {
        std::printf("topic %u\n", k);
        print_topic(k);
      }
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preferred-feature mining from reviews: topic model, profiles, recommendations"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  Global g;
  app.add_option("--config", g.config, "Flat key=value config file (default: $REVIEW_REC_CONFIG)")
      ->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);

  PreprocessCmd preprocess;
  TrainCmd train;
  ProfileCmd profile;
  RecommendCmd recommend;
  EvaluateCmd evaluate;
  TopwordsCmd topwords;
  auto* s_pre = app.add_subcommand("preprocess", "Tokenize reviews and build the vocabulary");
  auto* s_train = app.add_subcommand("train", "Train the topic model with collapsed Gibbs sampling");
  auto* s_prof = app.add_subcommand("profile", "Infer user and movie preference profiles");
  auto* s_rec = app.add_subcommand("recommend", "Rank movies for one user");
  auto* s_eval = app.add_subcommand("evaluate", "Leave-one-out evaluation");
  auto* s_top = app.add_subcommand("topwords", "Print the most probable words of topics");
  preprocess.add(s_pre);
  train.add(s_train);
  profile.add(s_prof);
  recommend.add(s_rec);
  evaluate.add(s_eval);
  topwords.add(s_top);

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (auto* s : app.get_subcommands({})) known = known || s->get_name() == argv[1];
    if (!known) {
      std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
      return kExitFatal;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kExitFatal;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    std::string config_path = g.config;
    if (config_path.empty())
      if (const char* env = std::getenv("REVIEW_REC_CONFIG"); env && *env) config_path = env;
    if (!config_path.empty()) apply_config(app, sub, read_config(config_path));

    if (sub == s_pre) return preprocess.run(sub, g);
    if (sub == s_train) return train.run(sub, g);
    if (sub == s_prof) return profile.run(sub, g);
    if (sub == s_rec) return recommend.run(sub, g);
    if (sub == s_eval) return evaluate.run(sub, g);
    return topwords.run(sub, g);
  } catch (const RecoverableError& e) {
    std::cerr << e.what() << '\n';
    return kExitRecoverable;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFatal;
  }
}

#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lpcode/classifier.hpp"
#include "lpcode/corpus_io.hpp"
#include "lpcode/dataset.hpp"
#include "lpcode/similarity.hpp"
#include "lpcode/stats.hpp"
#include "lpcode/style_features.hpp"
#include "lpcode/tfidf.hpp"

namespace lpcode {

inline constexpr std::string_view kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Digests and manifests

/// 64-bit FNV-1a.
class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  Fnv1a h;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  return "fnv1a64:" + h.hex();
}

/// Digest of pair identities and their folds; equal digests mean equal splits.
inline std::string split_digest(const std::vector<CodePair>& pairs, const FoldSplit& split) {
  Fnv1a h;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    h.update(pairs[i].human_id);
    h.update(std::string_view("\0", 1));
    h.update(pairs[i].candidate_id);
    h.update(std::string_view("\0", 1));
    h.update(std::to_string(split.fold[i]));
    h.update(std::string_view("\n", 1));
  }
  return "fnv1a64:" + h.hex();
}

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Run provenance. `timing` and `started_at` are the only fields that vary
/// between identical runs.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::uint64_t seed = 42;
  std::string corpus_digest;
  nlohmann::ordered_json splits = nlohmann::ordered_json::object();
  nlohmann::ordered_json timing = nlohmann::ordered_json::object();
  std::string started_at = utc_timestamp();

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "lpcodedec";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["corpus_digest"] = corpus_digest;
    j["splits"] = splits;
    j["timing"] = timing;
    j["started_at"] = started_at;
    return j;
  }
};

/// Report document: manifest plus payload.
inline nlohmann::ordered_json report_document(const RunManifest& m, nlohmann::ordered_json payload) {
  nlohmann::ordered_json j;
  j["manifest"] = m.to_json();
  for (auto& [k, v] : payload.items()) j[k] = v;
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Feature tables

struct FeatureExtraction {
  std::vector<std::optional<StyleVector>> vectors;  // parallel to the units
  std::vector<std::string> failures;                // ids that did not parse
  double seconds = 0;
};

inline FeatureExtraction extract_all(const std::vector<SourceUnit>& units, unsigned jobs) {
  FeatureExtraction fx;
  fx.vectors.resize(units.size());
  Stopwatch clock;
  parallel_for(units.size(), jobs, [&](std::size_t i) {
    try {
      fx.vectors[i] = extract_style_vector(units[i]);
    } catch (const ParseError&) {
    }
  });
  fx.seconds = clock.seconds();
  for (std::size_t i = 0; i < units.size(); ++i)
    if (!fx.vectors[i]) fx.failures.push_back(units[i].id);
  return fx;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

inline std::string exact_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  out << "id,generator,language";
  for (auto n : kFeatureNames) out << ',' << n;
  out << '\n';
  for (const auto& r : rows) {
    out << detail::csv_field(r.id) << ',' << to_string(r.generator) << ',' << to_string(r.language);
    for (double v : r.features.values()) out << ',' << detail::exact_real(v);
    out << '\n';
  }
}

inline std::vector<FeatureRow> read_features_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("features file is empty");
  auto header = detail::split_csv_line(line);
  if (header.size() != 3 + kStyleDims || header[0] != "id" || header[1] != "generator" || header[2] != "language")
    throw FormatError("unexpected features header");
  for (std::size_t i = 0; i < kStyleDims; ++i)
    if (header[3 + i] != kFeatureNames[i]) throw FormatError("unexpected feature column '" + header[3 + i] + "'");
  std::vector<FeatureRow> rows;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty() || line == "\r") continue;
    auto f = detail::split_csv_line(line);
    auto where = "features line " + std::to_string(n) + ": ";
    if (f.size() != header.size()) throw FormatError(where + "wrong column count");
    FeatureRow r;
    r.id = f[0];
    auto g = generator_from_string(f[1]);
    auto l = language_from_string(f[2]);
    if (!g || !l) throw FormatError(where + "bad generator or language");
    r.generator = *g;
    r.language = *l;
    std::vector<double> vals;
    for (std::size_t i = 0; i < kStyleDims; ++i) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(f[3 + i], &used));
        if (used != f[3 + i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw FormatError(where + "bad number '" + f[3 + i] + "'");
      }
    }
    r.features = StyleVector::from_values(vals);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Experiments

enum class Method { Lpcodedec, Levenshtein, Jaccard, TreeEdit, TfIdf };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Lpcodedec: return "lpcodedec";
    case Method::Levenshtein: return "levenshtein";
    case Method::Jaccard: return "jaccard";
    case Method::TreeEdit: return "tree_edit";
    case Method::TfIdf: return "tfidf";
  }
  return "?";
}

struct ExperimentOptions {
  Task task = Task::Task1;
  std::vector<Method> methods{Method::Lpcodedec};
  std::vector<std::optional<FeatureGroup>> groups{std::nullopt};  // nullopt = all features
  std::vector<Language> languages{kLanguages.begin(), kLanguages.end()};
  TrainConfig train;
  int folds = 5;
  unsigned jobs = 1;
  bool single_thread_timing = false;
  std::size_t tree_budget = kDefaultTreeBudget;
};

struct ExperimentResult {
  std::vector<EvalReport> reports;
  nlohmann::ordered_json splits = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
  std::map<Language, Detector> models;  // full-data detectors, when requested
  std::vector<std::pair<std::vector<CodePair>, std::vector<SimilarityScore>>> scores;
};

namespace detail {

/// Units of one language, pairs over them as unit indices, and their split.
struct LanguageSet {
  Language language;
  std::vector<SourceUnit> units;
  std::vector<CodePair> pairs;
  std::vector<std::pair<std::size_t, std::size_t>> unit_pairs;
  FoldSplit split;
  std::vector<int> labels;
};

inline std::vector<std::pair<std::size_t, std::size_t>> index_pairs(const std::vector<SourceUnit>& units,
                                                                    const std::vector<CodePair>& pairs) {
  std::unordered_map<std::string_view, std::size_t> at;
  for (std::size_t i = 0; i < units.size(); ++i) at.emplace(units[i].id, i);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : pairs) out.emplace_back(at.at(p.human_id), at.at(p.candidate_id));
  return out;
}

template <typename Score>
std::vector<SimilarityScore> score_pairs(const LanguageSet& ls, unsigned jobs, Score&& score) {
  std::vector<SimilarityScore> out(ls.unit_pairs.size());
  parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = score(ls.unit_pairs[i].first, ls.unit_pairs[i].second); });
  return out;
}

}  // namespace detail

/// Units of one language after the parse check, with pairs and split.
/// Returns nullopt when the language has no units or no pairs.
inline std::optional<detail::LanguageSet> prepare_language(const std::vector<SourceUnit>& corpus, Language lang,
                                                           Task task, std::uint64_t seed, int folds, unsigned jobs,
                                                           FeatureExtraction& fx,
                                                           std::vector<std::string>& warnings) {
  detail::LanguageSet ls{lang, {}, {}, {}, {}, {}};
  for (const auto& u : corpus)
    if (u.language == lang) ls.units.push_back(u);
  if (ls.units.empty()) return std::nullopt;
  const std::string lname(to_string(lang));

  // Style vectors double as the parse check shared by every method.
  fx = extract_all(ls.units, jobs);
  if (!fx.failures.empty()) {
    for (const auto& id : fx.failures) warnings.push_back(lname + ": unit '" + id + "' does not parse; excluded");
    std::vector<SourceUnit> kept;
    std::vector<std::optional<StyleVector>> vecs;
    for (std::size_t i = 0; i < ls.units.size(); ++i)
      if (fx.vectors[i]) {
        kept.push_back(std::move(ls.units[i]));
        vecs.push_back(fx.vectors[i]);
      }
    ls.units = std::move(kept);
    fx.vectors = std::move(vecs);
  }

  ls.pairs = task == Task::Task1 ? build_task1_pairs(ls.units, seed) : build_task2_instances(ls.units);
  if (ls.pairs.empty()) {
    warnings.push_back(lname + ": no pairs; language skipped");
    return std::nullopt;
  }
  ls.split = kfold_split(ls.pairs, folds, seed);
  ls.unit_pairs = detail::index_pairs(ls.units, ls.pairs);
  for (const auto& p : ls.pairs) ls.labels.push_back(task_label(p, task));
  return ls;
}

/// Builds pairs and folds per language and evaluates every requested
/// method on the same split.
inline ExperimentResult run_experiment(const std::vector<SourceUnit>& corpus, const ExperimentOptions& opt,
                                       bool keep_models = false) {
  ExperimentResult res;
  const unsigned timed_jobs = opt.single_thread_timing ? 1 : opt.jobs;
  for (Language lang : opt.languages) {
    FeatureExtraction fx;
    auto prepared = prepare_language(corpus, lang, opt.task, opt.train.seed, opt.folds, timed_jobs, fx, res.warnings);
    if (!prepared) continue;
    auto& ls = *prepared;
    const std::string lname(to_string(lang));
    const auto digest = split_digest(ls.pairs, ls.split);
    res.splits[lname] = {{"pairs", ls.pairs.size()}, {"folds", opt.folds}, {"digest", digest}};

    auto finish = [&](EvalReport r) {
      r.details["split_digest"] = digest;
      res.reports.push_back(std::move(r));
    };

    std::optional<std::vector<TokenList>> tokens;
    double token_seconds = 0;
    auto need_tokens = [&] {
      if (tokens) return;
      Stopwatch clock;
      tokens.emplace(ls.units.size());
      parallel_for(ls.units.size(), timed_jobs, [&](std::size_t i) { (*tokens)[i] = tokenize(ls.units[i]); });
      token_seconds = clock.seconds();
    };

    for (Method m : opt.methods) {
      switch (m) {
        case Method::Lpcodedec: {
          std::vector<PairVector> vectors;
          for (auto [h, c] : ls.unit_pairs) vectors.push_back(pair_feature_vector(*fx.vectors[h], *fx.vectors[c]));
          for (const auto& g : opt.groups) {
            auto r = g ? feature_group_ablation(vectors, ls.labels, opt.task, ls.split, opt.train, *g, lname,
                                                fx.seconds, opt.jobs)
                       : cross_validate(vectors, ls.labels, opt.task, ls.split, opt.train, lname, fx.seconds, opt.jobs);
            finish(std::move(r));
          }
          if (keep_models) res.models.emplace(lang, Detector::train(vectors, ls.labels, opt.task, opt.train));
          break;
        }
        case Method::TfIdf: {
          need_tokens();
          finish(tfidf_pair_classifier(ls.unit_pairs, *tokens, ls.labels, opt.task, ls.split, opt.train, lname,
                                       token_seconds, opt.jobs));
          break;
        }
        case Method::Levenshtein:
        case Method::Jaccard:
        case Method::TreeEdit: {
          if (opt.task != Task::Task1) throw InvalidUnit("similarity baselines only decide task 1");
          Timing shared;
          std::vector<SimilarityScore> scores;
          if (m == Method::Levenshtein) {
            Stopwatch clock;
            scores = detail::score_pairs(ls, timed_jobs, [&](std::size_t h, std::size_t c) {
              auto d = levenshtein_distance(ls.units[h].text, ls.units[c].text);
              auto longest = std::max(ls.units[h].text.size(), ls.units[c].text.size());
              double v = longest ? 1.0 - static_cast<double>(d) / static_cast<double>(longest) : 1.0;
              return SimilarityScore{SimilarityMethod::Levenshtein, v, static_cast<double>(d), true};
            });
            shared.inference = clock.seconds();
          } else if (m == Method::Jaccard) {
            Stopwatch prep;
            std::vector<TokenSet> sets(ls.units.size());
            parallel_for(ls.units.size(), timed_jobs, [&](std::size_t i) { sets[i] = token_set(tokenize(ls.units[i])); });
            shared.preprocessing = prep.seconds();
            Stopwatch clock;
            scores = detail::score_pairs(ls, timed_jobs, [&](std::size_t h, std::size_t c) {
              double v = jaccard_similarity(sets[h], sets[c]);
              return SimilarityScore{SimilarityMethod::Jaccard, v, v, true};
            });
            shared.inference = clock.seconds();
          } else {
            Stopwatch prep;
            std::vector<LabeledTree> trees(ls.units.size());
            parallel_for(ls.units.size(), timed_jobs, [&](std::size_t i) { trees[i] = labeled_tree(parse(ls.units[i])); });
            shared.preprocessing = prep.seconds();
            Stopwatch clock;
            scores = detail::score_pairs(ls, timed_jobs, [&](std::size_t h, std::size_t c) {
              try {
                auto d = tree_edit_distance(trees[h], trees[c], opt.tree_budget);
                return SimilarityScore{SimilarityMethod::TreeEdit, ted_similarity(d, trees[h].size(), trees[c].size()),
                                       static_cast<double>(d), true};
              } catch (const TreeTooLarge&) {
                return SimilarityScore{SimilarityMethod::TreeEdit, 0, 0, false};
              }
            });
            shared.inference = clock.seconds();
          }
          auto r = threshold_cross_validate(std::string(to_string(m)), scores, ls.labels, ls.split, lname, shared);
          finish(std::move(r));
          res.scores.emplace_back(ls.pairs, std::move(scores));
          break;
        }
      }
    }
  }
  return res;
}

/// Per-report timing for the manifest, keyed "method/language".
inline nlohmann::ordered_json timing_json(const std::vector<EvalReport>& reports) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& r : reports) j[r.method + "/" + r.language] = r.timing.to_json();
  return j;
}

}  // namespace lpcode

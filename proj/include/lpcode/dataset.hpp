#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/regex.hpp>
#include <json.hpp>

#include "lpcode/errors.hpp"
#include "lpcode/parallel.hpp"
#include "lpcode/parser.hpp"
#include "lpcode/random.hpp"
#include "lpcode/types.hpp"

namespace lpcode {

// ---------------------------------------------------------------------------
// Near-duplicate filtering

/// Physical lines with trailing whitespace removed.
inline std::vector<std::string_view> trimmed_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    auto last = line.find_last_not_of(" \t\r\f\v");
    lines.push_back(last == std::string_view::npos ? line.substr(0, 0) : line.substr(0, last + 1));
    start = end + 1;
  }
  return lines;
}

/// LCS length over two sequences, O(min(n, m)) memory.
template <typename T>
std::size_t lcs_length(const std::vector<T>& a, const std::vector<T>& b) {
  const auto& outer = a.size() >= b.size() ? a : b;
  const auto& inner = a.size() >= b.size() ? b : a;
  std::vector<std::uint32_t> row(inner.size() + 1, 0);
  for (const auto& x : outer) {
    std::uint32_t diag = 0;
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      std::uint32_t up = row[j];
      row[j] = x == inner[j - 1] ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row.back();
}

/// Line-level LCS divided by the longer line count. Two empty texts are identical.
inline double lcs_similarity(std::string_view a, std::string_view b) {
  auto la = trimmed_lines(a);
  auto lb = trimmed_lines(b);
  std::size_t longest = std::max(la.size(), lb.size());
  if (longest == 0) return 1.0;
  // Intern lines so the DP compares integers.
  std::unordered_map<std::string_view, std::uint32_t> ids;
  auto intern = [&](const std::vector<std::string_view>& lines) {
    std::vector<std::uint32_t> out;
    out.reserve(lines.size());
    for (auto l : lines) out.push_back(ids.emplace(l, static_cast<std::uint32_t>(ids.size())).first->second);
    return out;
  };
  auto ia = intern(la);
  auto ib = intern(lb);
  return static_cast<double>(lcs_length(ia, ib)) / static_cast<double>(longest);
}

inline double lcs_similarity(const SourceUnit& a, const SourceUnit& b) {
  return lcs_similarity(a.text, b.text);
}

/// Linear-interpolation percentile, rank = q/100 * (n-1) on the sorted values.
inline double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyInput("percentile of an empty list");
  q = std::clamp(q, 0.0, 100.0);
  std::sort(values.begin(), values.end());
  double rank = q / 100.0 * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(rank));
  auto hi = std::min(lo + 1, values.size() - 1);
  double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

struct UnitPair {
  const SourceUnit* human = nullptr;
  const SourceUnit* paraphrase = nullptr;
};

struct NearIdenticalReport {
  std::vector<double> similarity;      // parallel to the input pairs
  std::vector<bool> removed;           // parallel to the input pairs
  std::map<Language, double> threshold;
};

/// Marks pairs at or above the per-language 75th percentile of LCS similarity.
inline NearIdenticalReport near_identical_report(const std::vector<UnitPair>& pairs, unsigned jobs = 1,
                                                 double q = 75.0) {
  NearIdenticalReport r;
  r.similarity.assign(pairs.size(), 0.0);
  r.removed.assign(pairs.size(), false);
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    r.similarity[i] = lcs_similarity(*pairs[i].human, *pairs[i].paraphrase);
  });
  std::map<Language, std::vector<double>> by_lang;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    by_lang[pairs[i].human->language].push_back(r.similarity[i]);
  for (auto& [lang, sims] : by_lang) r.threshold[lang] = percentile(sims, q);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    r.removed[i] = r.similarity[i] >= r.threshold[pairs[i].human->language];
  return r;
}

inline std::vector<UnitPair> filter_near_identical(const std::vector<UnitPair>& pairs, unsigned jobs = 1) {
  auto r = near_identical_report(pairs, jobs);
  std::vector<UnitPair> kept;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (!r.removed[i]) kept.push_back(pairs[i]);
  return kept;
}

// ---------------------------------------------------------------------------
// Anonymization

namespace detail {

inline const boost::regex& pii_pattern() {
  static const boost::regex re(
      // 1: URL
      R"(((?<![A-Za-z0-9])(?:(?:https?|ftp)://|www\.)[^\s"'`<>()\[\]{}]*[^\s"'`<>()\[\]{}.,;:!?]))"
      // 2: email
      R"(|((?<![A-Za-z0-9._%+-])[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}(?![A-Za-z0-9_-])))"
      // 3: phone, every form has at least seven digits
      R"(|((?<![\w+.-])(?:)"
      R"(\+(?=(?:[ .()-]{0,2}\d){7})\d{1,3}(?:[ .-]?(?:\(\d{1,4}\)|\d{1,4}))+)"
      R"(|\(\d{2,4}\)[ .-]?\d{3,4}[ .-]\d{4})"
      R"(|\d{2,4}-\d{3,4}-\d{4})"
      R"(|\d{3}\.\d{3}\.\d{4})"
      R"(|\d{3}-\d{4})"
      R"()(?![\w.-])))",
      boost::regex::perl);
  return re;
}

}  // namespace detail

/// Replaces emails, URLs and phone numbers with placeholder tokens.
inline std::string anonymize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  boost::regex_replace(std::back_inserter(out), text.begin(), text.end(), detail::pii_pattern(),
                       "(?1<URL>)(?2<EMAIL>)(?3<PHONE>)", boost::format_all);
  return out;
}

// ---------------------------------------------------------------------------
// Pairs, instances and folds

enum class Task1Label { Unrelated = 0, Paraphrase = 1 };

inline std::string_view to_string(Task1Label l) {
  return l == Task1Label::Paraphrase ? "paraphrase" : "unrelated";
}

inline std::optional<Task1Label> task1_label_from_string(std::string_view s) {
  if (s == "paraphrase") return Task1Label::Paraphrase;
  if (s == "unrelated") return Task1Label::Unrelated;
  return std::nullopt;
}

struct CodePair {
  std::string human_id;
  std::string candidate_id;
  Language language = Language::C;
  Task1Label task1_label = Task1Label::Unrelated;
  std::optional<Generator> task2_label;  // set on paraphrase pairs

  std::string id() const { return human_id + "::" + candidate_id; }

  friend bool operator==(const CodePair&, const CodePair&) = default;
};

namespace detail {

inline bool pair_less(const CodePair& a, const CodePair& b) {
  return std::tie(a.language, a.human_id, a.candidate_id) < std::tie(b.language, b.human_id, b.candidate_id);
}

struct LanguagePool {
  std::vector<const SourceUnit*> humans;  // sorted by id
  std::vector<const SourceUnit*> llm;     // sorted by id
  std::vector<CodePair> positives;
};

inline std::map<Language, LanguagePool> pools(const std::vector<SourceUnit>& corpus) {
  std::unordered_map<std::string_view, const SourceUnit*> humans;
  for (const auto& u : corpus)
    if (u.is_human()) humans.emplace(u.id, &u);
  std::map<Language, LanguagePool> out;
  for (const auto& u : corpus) {
    auto& pool = out[u.language];
    if (u.is_human()) {
      pool.humans.push_back(&u);
      continue;
    }
    pool.llm.push_back(&u);
    auto h = humans.find(u.origin_id);
    if (h == humans.end()) continue;
    if (h->second->language != u.language)
      throw InvalidUnit("paraphrase '" + u.id + "' differs in language from its origin");
    pool.positives.push_back({h->second->id, u.id, u.language, Task1Label::Paraphrase, u.generator});
  }
  auto by_id = [](const SourceUnit* a, const SourceUnit* b) { return a->id < b->id; };
  for (auto& [lang, pool] : out) {
    std::sort(pool.humans.begin(), pool.humans.end(), by_id);
    std::sort(pool.llm.begin(), pool.llm.end(), by_id);
    std::sort(pool.positives.begin(), pool.positives.end(), pair_less);
  }
  return out;
}

}  // namespace detail

/// Paraphrase pairs plus an equal number of same-language unrelated pairs
/// drawn uniformly without replacement.
inline std::vector<CodePair> build_task1_pairs(const std::vector<SourceUnit>& corpus, std::uint64_t seed) {
  std::vector<CodePair> out;
  for (auto& [lang, pool] : detail::pools(corpus)) {
    const std::size_t need = pool.positives.size();
    const std::size_t nh = pool.humans.size(), nl = pool.llm.size();
    const std::size_t available = nh * nl - need;
    if (available < need)
      throw InsufficientNegatives(std::string(to_string(lang)) + ": " + std::to_string(available) +
                                  " unrelated combinations for " + std::to_string(need) + " positives");
    auto matches = [&](std::size_t h, std::size_t c) { return pool.llm[c]->origin_id == pool.humans[h]->id; };
    auto rng = Rng::derive(seed, static_cast<std::uint64_t>(lang));
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    if (available < 2 * need) {
      // Small pool: enumerate it and take a partial Fisher-Yates prefix.
      std::vector<std::pair<std::size_t, std::size_t>> all;
      for (std::size_t h = 0; h < nh; ++h)
        for (std::size_t c = 0; c < nl; ++c)
          if (!matches(h, c)) all.emplace_back(h, c);
      for (std::size_t i = 0; i < need; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
      chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(need));
    } else {
      std::set<std::pair<std::size_t, std::size_t>> seen;
      while (chosen.size() < need) {
        std::size_t h = rng.below(nh), c = rng.below(nl);
        if (matches(h, c) || !seen.emplace(h, c).second) continue;
        chosen.emplace_back(h, c);
      }
    }
    out.insert(out.end(), pool.positives.begin(), pool.positives.end());
    for (auto [h, c] : chosen)
      out.push_back({pool.humans[h]->id, pool.llm[c]->id, lang, Task1Label::Unrelated, std::nullopt});
  }
  std::sort(out.begin(), out.end(), detail::pair_less);
  return out;
}

/// One instance per paraphrase, labelled with the model that wrote it.
inline std::vector<CodePair> build_task2_instances(const std::vector<SourceUnit>& corpus) {
  std::vector<CodePair> out;
  for (auto& [lang, pool] : detail::pools(corpus))
    out.insert(out.end(), pool.positives.begin(), pool.positives.end());
  std::sort(out.begin(), out.end(), detail::pair_less);
  return out;
}

struct FoldSplit {
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<int> fold;  // parallel to the split pairs

  std::map<std::string, int> assignments(const std::vector<CodePair>& pairs) const {
    std::map<std::string, int> m;
    for (std::size_t i = 0; i < pairs.size(); ++i) m[pairs[i].id()] = fold[i];
    return m;
  }

  std::vector<std::size_t> test_indices(int f) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] == f) idx.push_back(i);
    return idx;
  }

  std::vector<std::size_t> train_indices(int f) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] != f) idx.push_back(i);
    return idx;
  }
};

/// Stratified k-fold assignment. Strata are (language, paraphrase flag,
/// paraphrasing model); each is shuffled and dealt round-robin with an offset
/// carried across strata, so any coarser grouping of strata (and the folds
/// as a whole) also differs in size by at most one.
inline FoldSplit kfold_split(const std::vector<CodePair>& pairs, int k, std::uint64_t seed) {
  if (k < 2) throw TooFewInstances("fold count must be at least 2, got " + std::to_string(k));
  if (pairs.size() < static_cast<std::size_t>(k))
    throw TooFewInstances(std::to_string(pairs.size()) + " pairs for " + std::to_string(k) + " folds");
  using Key = std::tuple<Language, Task1Label, int>;
  std::map<Key, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    strata[{p.language, p.task1_label, p.task2_label ? llm_index(*p.task2_label) : -1}].push_back(i);
  }
  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.fold.assign(pairs.size(), -1);
  std::size_t offset = 0;
  std::uint64_t stream = 0;
  for (auto& [key, members] : strata) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return detail::pair_less(pairs[a], pairs[b]); });
    auto rng = Rng::derive(seed, stream++);
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t j = 0; j < members.size(); ++j)
      split.fold[members[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
    offset = (offset + members.size()) % static_cast<std::size_t>(k);
  }
  return split;
}

// ---------------------------------------------------------------------------
// Corpus cleaning

enum class DropReason { Orphan, NearIdentical, Parse, Unbalanced };

inline std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::Orphan: return "orphan";
    case DropReason::NearIdentical: return "near_identical";
    case DropReason::Parse: return "parse";
    case DropReason::Unbalanced: return "unbalanced";
  }
  return "?";
}

struct Drop {
  std::string id;
  DropReason reason;
  std::string detail;
};

struct CleanOptions {
  unsigned jobs = 1;
  double percentile = 75.0;
  bool balanced = false;  // keep only humans with a paraphrase from every model
};

struct CleanResult {
  std::vector<SourceUnit> units;
  std::vector<Drop> drops;
  std::map<Language, double> thresholds;
};

/// Near-duplicate removal, parseability check and anonymization, in that
/// order. Paraphrases whose original is missing or dropped go as orphans.
/// Surviving units keep their input order.
inline CleanResult clean_corpus(std::vector<SourceUnit> units, const CleanOptions& opt = {}) {
  CleanResult res;
  std::vector<bool> dropped(units.size(), false);
  auto drop = [&](std::size_t i, DropReason why, std::string detail = {}) {
    if (dropped[i]) return;
    dropped[i] = true;
    res.drops.push_back({units[i].id, why, std::move(detail)});
  };
  std::unordered_map<std::string, std::size_t> human_at;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].is_human()) human_at.emplace(units[i].id, i);
  auto origin_of = [&](std::size_t i) -> std::optional<std::size_t> {
    auto it = human_at.find(units[i].origin_id);
    if (it == human_at.end() || dropped[it->second] || units[it->second].language != units[i].language)
      return std::nullopt;
    return it->second;
  };
  auto drop_orphans = [&] {
    for (std::size_t i = 0; i < units.size(); ++i)
      if (!dropped[i] && !units[i].is_human() && !origin_of(i))
        drop(i, DropReason::Orphan, "origin '" + units[i].origin_id + "' unavailable");
  };

  drop_orphans();

  std::vector<UnitPair> pairs;
  std::vector<std::size_t> pair_unit;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (dropped[i] || units[i].is_human()) continue;
    pairs.push_back({&units[*origin_of(i)], &units[i]});
    pair_unit.push_back(i);
  }
  auto report = near_identical_report(pairs, opt.jobs, opt.percentile);
  res.thresholds = report.threshold;
  for (std::size_t k = 0; k < pairs.size(); ++k)
    if (report.removed[k]) drop(pair_unit[k], DropReason::NearIdentical, "lcs " + std::to_string(report.similarity[k]));

  std::vector<char> parse_ok(units.size(), 1);
  parallel_for(units.size(), opt.jobs, [&](std::size_t i) {
    if (dropped[i]) return;
    if (!is_parseable(units[i])) {
      parse_ok[i] = 0;
      return;
    }
    auto clean = anonymize(units[i].text);
    if (clean != units[i].text) {
      units[i].text = std::move(clean);
      if (!is_parseable(units[i])) parse_ok[i] = 0;
    }
  });
  for (std::size_t i = 0; i < units.size(); ++i)
    if (!parse_ok[i]) drop(i, DropReason::Parse);
  drop_orphans();

  if (opt.balanced) {
    std::unordered_map<std::size_t, std::set<Generator>> models;
    for (std::size_t i = 0; i < units.size(); ++i)
      if (!dropped[i] && !units[i].is_human()) models[*origin_of(i)].insert(units[i].generator);
    for (std::size_t i = 0; i < units.size(); ++i)
      if (!dropped[i] && units[i].is_human() && models[i].size() < kLlmGenerators.size())
        drop(i, DropReason::Unbalanced, std::to_string(models[i].size()) + " of 4 models");
    drop_orphans();
  }

  for (std::size_t i = 0; i < units.size(); ++i)
    if (!dropped[i]) res.units.push_back(std::move(units[i]));
  return res;
}

// ---------------------------------------------------------------------------
// Pair files

/// One JSON object per pair; `fold` is null when no split is given.
inline void write_pairs(std::ostream& out, const std::vector<CodePair>& pairs, const FoldSplit* split = nullptr) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    nlohmann::ordered_json j;
    j["human_id"] = p.human_id;
    j["candidate_id"] = p.candidate_id;
    j["task1_label"] = to_string(p.task1_label);
    j["task2_label"] = p.task2_label ? nlohmann::ordered_json(std::string(to_string(*p.task2_label))) : nullptr;
    j["fold"] = split ? nlohmann::ordered_json(split->fold[i]) : nullptr;
    out << j.dump() << '\n';
  }
}

struct PairFile {
  std::vector<CodePair> pairs;
  std::vector<std::optional<int>> fold;
};

/// Reads a pair file; languages are looked up in `corpus`.
inline PairFile read_pairs(std::istream& in, const std::vector<SourceUnit>& corpus) {
  std::unordered_map<std::string_view, const SourceUnit*> by_id;
  for (const auto& u : corpus) by_id.emplace(u.id, &u);
  PairFile pf;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = "pair line " + std::to_string(n) + ": ";
    try {
      auto j = nlohmann::json::parse(line);
      CodePair p;
      p.human_id = j.at("human_id").get<std::string>();
      p.candidate_id = j.at("candidate_id").get<std::string>();
      auto h = by_id.find(p.human_id);
      auto c = by_id.find(p.candidate_id);
      if (h == by_id.end() || c == by_id.end()) throw FormatError(where + "unit not in corpus");
      if (!h->second->is_human() || c->second->is_human() || h->second->language != c->second->language)
        throw FormatError(where + "not a (human, LLM) pair of one language");
      p.language = h->second->language;
      auto l1 = task1_label_from_string(j.at("task1_label").get<std::string>());
      if (!l1) throw FormatError(where + "bad task1_label");
      p.task1_label = *l1;
      if (auto t2 = j.find("task2_label"); t2 != j.end() && !t2->is_null()) {
        auto g = generator_from_string(t2->get<std::string>());
        if (!g || *g == Generator::Human) throw FormatError(where + "bad task2_label");
        p.task2_label = g;
      }
      std::optional<int> fold;
      if (auto f = j.find("fold"); f != j.end() && !f->is_null()) fold = f->get<int>();
      pf.pairs.push_back(std::move(p));
      pf.fold.push_back(fold);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + e.what());
    }
  }
  return pf;
}

}  // namespace lpcode

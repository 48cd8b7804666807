#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lpcode/classifier.hpp"
#include "lpcode/errors.hpp"
#include "lpcode/vectors.hpp"

namespace lpcode {

using TokenList = std::vector<std::string>;

/// Term frequency times smoothed idf = ln((1 + N) / (1 + df)) + 1, rows
/// L2-normalized. Vocabulary indices follow lexicographic token order.
class TfIdfVectorizer {
 public:
  static TfIdfVectorizer fit(const std::vector<const TokenList*>& docs) {
    if (docs.empty()) throw EmptyCorpus("TF-IDF fitted on no documents");
    std::map<std::string, std::size_t> df;
    for (const auto* d : docs) {
      auto uniq = *d;
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (auto& t : uniq) ++df[t];
    }
    TfIdfVectorizer v;
    v.documents_ = docs.size();
    const double n = static_cast<double>(docs.size());
    for (auto& [term, count] : df) {
      v.index_.emplace(term, static_cast<std::uint32_t>(v.terms_.size()));
      v.terms_.push_back(term);
      v.df_.push_back(count);
      v.idf_.push_back(std::log((1 + n) / (1 + static_cast<double>(count))) + 1);
    }
    return v;
  }

  static TfIdfVectorizer fit(const std::vector<TokenList>& docs) {
    std::vector<const TokenList*> ptrs;
    for (const auto& d : docs) ptrs.push_back(&d);
    return fit(ptrs);
  }

  /// Unseen tokens are ignored; an empty result is the zero vector.
  SparseVector transform(const TokenList& doc) const {
    std::map<std::uint32_t, double> tf;
    for (const auto& t : doc)
      if (auto it = index_.find(t); it != index_.end()) tf[it->second] += 1;
    SparseVector v;
    v.dim = static_cast<std::uint32_t>(terms_.size());
    double norm = 0;
    for (auto [j, c] : tf) {
      v.index.push_back(j);
      v.value.push_back(c * idf_[j]);
      norm += v.value.back() * v.value.back();
    }
    norm = std::sqrt(norm);
    if (norm > 0)
      for (auto& x : v.value) x /= norm;
    return v;
  }

  std::size_t vocabulary_size() const { return terms_.size(); }
  std::size_t documents() const { return documents_; }
  const std::vector<std::string>& terms() const { return terms_; }

  /// idf of a known term, or nullopt.
  std::optional<double> idf(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return idf_[it->second];
  }

 private:
  std::size_t documents_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
};

/// Per fold: fit TF-IDF on the units of the training pairs, represent each
/// pair as [human vector, candidate vector] and train the MLP on it without
/// standardization. Pairs index into `tokens` (one list per unit).
inline EvalReport tfidf_pair_classifier(const std::vector<std::pair<std::size_t, std::size_t>>& unit_pairs,
                                        const std::vector<TokenList>& tokens, const std::vector<int>& labels,
                                        Task task, const FoldSplit& split, TrainConfig cfg, std::string language,
                                        double tokenization = 0, unsigned jobs = 1) {
  cfg.standardize = false;
  auto featurize = [&](const std::vector<std::size_t>& train_idx, const std::vector<std::size_t>& test_idx) {
    std::vector<char> in_train(tokens.size(), 0);
    for (auto i : train_idx) in_train[unit_pairs[i].first] = in_train[unit_pairs[i].second] = 1;
    std::vector<const TokenList*> docs;
    for (std::size_t u = 0; u < tokens.size(); ++u)
      if (in_train[u]) docs.push_back(&tokens[u]);
    auto vec = TfIdfVectorizer::fit(docs);
    std::unordered_map<std::size_t, SparseVector> cache;
    auto of = [&](std::size_t u) -> const SparseVector& {
      auto it = cache.find(u);
      if (it == cache.end()) it = cache.emplace(u, vec.transform(tokens[u])).first;
      return it->second;
    };
    FoldFeatures<SparseVector> d;
    for (auto i : train_idx) d.train.push_back(concat(of(unit_pairs[i].first), of(unit_pairs[i].second)));
    for (auto i : test_idx) d.test.push_back(concat(of(unit_pairs[i].first), of(unit_pairs[i].second)));
    d.details["vocabulary"] = vec.vocabulary_size();
    d.details["input_dim"] = 2 * vec.vocabulary_size();
    return d;
  };
  auto folds = cross_validate_mlp<SparseVector>(labels, class_count(task), split, cfg, featurize, jobs);
  auto r = assemble_report("tfidf", task, std::move(language), folds);
  r.timing.preprocessing += tokenization;
  double dims = 0;
  for (const auto& f : folds) dims += f.details.value("input_dim", 0.0);
  dims /= static_cast<double>(folds.size());
  r.details["mean_input_dim"] = dims;
  r.details["dimension_ratio_vs_style"] = dims / static_cast<double>(kPairDims);
  return r;
}

// ---------------------------------------------------------------------------
// Generator similarity

struct GeneratorHeatmap {
  std::string language;
  std::vector<std::string> generators;
  std::vector<std::vector<double>> similarity;

  nlohmann::ordered_json to_json() const {
    return {{"language", language}, {"generators", generators}, {"similarity", similarity}};
  }

  void write_csv(std::ostream& out) const {
    out << "generator";
    for (const auto& g : generators) out << ',' << g;
    out << '\n';
    for (std::size_t r = 0; r < generators.size(); ++r) {
      out << generators[r];
      for (double v : similarity[r]) out << ',' << format_real(v);
      out << '\n';
    }
  }
};

/// Cosine similarity between generator profiles, each the re-normalized
/// mean of its documents' TF-IDF vectors. The vectorizer is fitted on all
/// documents given. `docs[i]` is written by `owners[i]`.
inline GeneratorHeatmap generator_tfidf_heatmap(const std::vector<TokenList>& docs,
                                                const std::vector<Generator>& owners, std::string language) {
  if (docs.size() != owners.size()) throw LengthMismatch("documents and generators differ in length");
  for (auto g : kGenerators)
    if (std::find(owners.begin(), owners.end(), g) == owners.end())
      throw MissingGenerator(language + ": no documents from " + std::string(to_string(g)));
  auto vec = TfIdfVectorizer::fit(docs);
  const std::size_t dim = vec.vocabulary_size();
  std::vector<std::vector<double>> profile(kGenerators.size(), std::vector<double>(dim, 0.0));
  std::vector<double> members(kGenerators.size(), 0.0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto g = static_cast<std::size_t>(owners[i]);
    auto v = vec.transform(docs[i]);
    for (std::size_t k = 0; k < v.nnz(); ++k) profile[g][v.index[k]] += v.value[k];
    members[g] += 1;
  }
  for (std::size_t g = 0; g < profile.size(); ++g) {
    double norm = 0;
    for (auto& x : profile[g]) {
      x /= members[g];
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 0)
      for (auto& x : profile[g]) x /= norm;
  }
  GeneratorHeatmap h;
  h.language = std::move(language);
  for (auto g : kGenerators) h.generators.emplace_back(to_string(g));
  h.similarity.assign(kGenerators.size(), std::vector<double>(kGenerators.size(), 0.0));
  for (std::size_t a = 0; a < profile.size(); ++a)
    for (std::size_t b = 0; b < profile.size(); ++b) {
      double s = 0;
      for (std::size_t k = 0; k < dim; ++k) s += profile[a][k] * profile[b][k];
      h.similarity[a][b] = std::clamp(s, 0.0, 1.0);
    }
  return h;
}

}  // namespace lpcode

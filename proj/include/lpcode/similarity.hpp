#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lpcode/classifier.hpp"
#include "lpcode/errors.hpp"
#include "lpcode/parser.hpp"
#include "lpcode/stats.hpp"
#include "lpcode/syntax_tree.hpp"

namespace lpcode {

// ---------------------------------------------------------------------------
// Levenshtein

/// Byte-level edit distance with two rolling rows.
inline std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1])});
      diag = up;
    }
  }
  return row[b.size()];
}

inline double levenshtein_similarity(std::string_view a, std::string_view b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein_distance(a, b)) / static_cast<double>(longest);
}

// ---------------------------------------------------------------------------
// Jaccard

using TokenSet = std::vector<std::string>;  // sorted, unique

inline TokenSet token_set(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

inline double jaccard_similarity(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common, ++i, ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

inline double jaccard_similarity(const SourceUnit& a, const SourceUnit& b) {
  return jaccard_similarity(token_set(tokenize(a)), token_set(tokenize(b)));
}

// ---------------------------------------------------------------------------
// Tree edit distance

/// Ordered labelled tree; node 0 is the root.
struct LabeledTree {
  std::vector<std::string> labels;
  std::vector<std::vector<std::uint32_t>> children;

  std::size_t size() const { return labels.size(); }

  std::uint32_t add(std::string label, std::optional<std::uint32_t> parent = std::nullopt) {
    labels.push_back(std::move(label));
    children.emplace_back();
    auto id = static_cast<std::uint32_t>(labels.size() - 1);
    if (parent) children[*parent].push_back(id);
    return id;
  }
};

/// Node kinds of a syntax tree as labels.
inline LabeledTree labeled_tree(const SyntaxTree& t) {
  LabeledTree out;
  out.labels.reserve(t.size());
  out.children.reserve(t.size());
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    out.labels.emplace_back(t.node(i).kind);
    out.children.emplace_back(t.node(i).children.begin(), t.node(i).children.end());
  }
  return out;
}

inline constexpr std::size_t kDefaultTreeBudget = 3000;

namespace detail {

struct Postorder {
  std::vector<std::uint32_t> label;  // interned, 1-based positions
  std::vector<std::size_t> leftmost;  // leftmost leaf of each position
  std::vector<std::size_t> keyroots;
};

inline Postorder postorder(const LabeledTree& t, std::vector<std::string>& dict) {
  Postorder p;
  const std::size_t n = t.size();
  p.label.assign(n + 1, 0);
  p.leftmost.assign(n + 1, 0);
  // Iterative postorder walk.
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  std::vector<std::size_t> first_leaf_of(n, 0);
  std::size_t pos = 0;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < t.children[node].size()) {
      auto c = t.children[node][next++];
      stack.emplace_back(c, 0);
      continue;
    }
    ++pos;
    auto it = std::find(dict.begin(), dict.end(), t.labels[node]);
    if (it == dict.end()) it = dict.insert(dict.end(), t.labels[node]);
    p.label[pos] = static_cast<std::uint32_t>(it - dict.begin());
    first_leaf_of[node] = t.children[node].empty() ? pos : first_leaf_of[t.children[node].front()];
    p.leftmost[pos] = first_leaf_of[node];
    stack.pop_back();
  }
  // A keyroot is the highest position for its leftmost leaf.
  std::vector<std::size_t> highest(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) highest[p.leftmost[i]] = i;
  for (std::size_t i = 1; i <= n; ++i)
    if (highest[p.leftmost[i]] == i) p.keyroots.push_back(i);
  return p;
}

}  // namespace detail

/// Zhang-Shasha ordered tree edit distance with unit costs.
/// Throws TreeTooLarge when either tree exceeds `budget` nodes.
inline std::size_t tree_edit_distance(const LabeledTree& a, const LabeledTree& b,
                                      std::size_t budget = kDefaultTreeBudget) {
  if (a.size() > budget || b.size() > budget)
    throw TreeTooLarge(std::to_string(std::max(a.size(), b.size())) + " nodes exceed the budget of " +
                       std::to_string(budget));
  if (a.size() == 0 || b.size() == 0) return a.size() + b.size();
  std::vector<std::string> dict;
  auto pa = detail::postorder(a, dict);
  auto pb = detail::postorder(b, dict);
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::uint32_t> td((n + 1) * (m + 1), 0);
  std::vector<std::uint32_t> fd((n + 2) * (m + 2), 0);
  const std::size_t w = m + 2;
  for (std::size_t i : pa.keyroots) {
    for (std::size_t j : pb.keyroots) {
      const std::size_t li = pa.leftmost[i], lj = pb.leftmost[j];
      // fd indices are offset so that row/column 0 stand for the empty forest.
      const std::size_t rows = i - li + 2, cols = j - lj + 2;
      fd[0] = 0;
      for (std::size_t x = 1; x < rows; ++x) fd[x * w] = static_cast<std::uint32_t>(x);
      for (std::size_t y = 1; y < cols; ++y) fd[y] = static_cast<std::uint32_t>(y);
      for (std::size_t x = 1; x < rows; ++x) {
        const std::size_t nx = li + x - 1;
        for (std::size_t y = 1; y < cols; ++y) {
          const std::size_t ny = lj + y - 1;
          std::uint32_t del = fd[(x - 1) * w + y] + 1;
          std::uint32_t ins = fd[x * w + y - 1] + 1;
          if (pa.leftmost[nx] == li && pb.leftmost[ny] == lj) {
            std::uint32_t sub = fd[(x - 1) * w + y - 1] + (pa.label[nx] != pb.label[ny]);
            fd[x * w + y] = std::min({del, ins, sub});
            td[nx * (m + 1) + ny] = fd[x * w + y];
          } else {
            std::size_t px = pa.leftmost[nx] - li, py = pb.leftmost[ny] - lj;
            fd[x * w + y] = std::min({del, ins, fd[px * w + py] + td[nx * (m + 1) + ny]});
          }
        }
      }
    }
  }
  return td[n * (m + 1) + m];
}

inline double ted_similarity(std::size_t distance, std::size_t size_a, std::size_t size_b) {
  if (size_a + size_b == 0) return 1.0;
  return 1.0 - static_cast<double>(distance) / static_cast<double>(size_a + size_b);
}

inline double ted_similarity(const LabeledTree& a, const LabeledTree& b, std::size_t budget = kDefaultTreeBudget) {
  return ted_similarity(tree_edit_distance(a, b, budget), a.size(), b.size());
}

// ---------------------------------------------------------------------------
// Scores and threshold decisions

enum class SimilarityMethod { Levenshtein, Jaccard, TreeEdit, TfIdfCosine };

inline std::string_view to_string(SimilarityMethod m) {
  switch (m) {
    case SimilarityMethod::Levenshtein: return "levenshtein";
    case SimilarityMethod::Jaccard: return "jaccard";
    case SimilarityMethod::TreeEdit: return "tree_edit";
    case SimilarityMethod::TfIdfCosine: return "tfidf_cosine";
  }
  return "?";
}

struct SimilarityScore {
  SimilarityMethod method = SimilarityMethod::Jaccard;
  double value = 0;  // in [0, 1]
  double raw = 0;    // distance where the method has one, else the value
  bool scored = true;
};

inline void write_scores_csv_header(std::ostream& out) { out << "human_id,candidate_id,method,value,raw\n"; }

inline void write_scores_csv(std::ostream& out, const std::vector<CodePair>& pairs,
                             const std::vector<SimilarityScore>& scores) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out << pairs[i].human_id << ',' << pairs[i].candidate_id << ',' << to_string(scores[i].method) << ',';
    if (scores[i].scored)
      out << format_real(scores[i].value) << ',' << format_real(scores[i].raw) << '\n';
    else
      out << ",\n";
  }
}

struct ThresholdFit {
  double threshold = 0;
  double train_f1 = 0;
  bool degenerate = false;  // all training scores equal
};

/// Threshold maximizing training F1 (score >= threshold means paraphrase).
/// Candidates are the lowest score, midpoints between consecutive distinct
/// scores and a value above the highest; ties keep the lowest threshold.
inline ThresholdFit fit_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw LengthMismatch("scores and labels differ in length");
  if (scores.empty()) throw EmptyInput("no training scores");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  long positives = 0;
  for (int y : labels) positives += y == 1;
  auto f1 = [&](long tp, long predicted) {
    if (tp == 0) return 0.0;
    double p = static_cast<double>(tp) / static_cast<double>(predicted);
    double r = static_cast<double>(tp) / static_cast<double>(positives);
    return 100 * 2 * p * r / (p + r);
  };
  ThresholdFit best;
  best.threshold = scores[order.front()];
  best.train_f1 = f1(positives, static_cast<long>(scores.size()));
  best.degenerate = scores[order.front()] == scores[order.back()];
  // Walk upward; after consuming a run of equal scores, everything above is predicted positive.
  long tp = positives, predicted = static_cast<long>(scores.size());
  for (std::size_t k = 0; k < order.size();) {
    double v = scores[order[k]];
    while (k < order.size() && scores[order[k]] == v) {
      tp -= labels[order[k]] == 1;
      --predicted;
      ++k;
    }
    double t = k < order.size() ? v + (scores[order[k]] - v) / 2
                                : std::nextafter(v, std::numeric_limits<double>::infinity());
    double score = f1(tp, predicted);
    if (score > best.train_f1) best = {t, score, best.degenerate};
  }
  return best;
}

inline int apply_threshold(double score, double threshold) { return score >= threshold ? 1 : 0; }

/// Task 1 cross-validation of a similarity score with a per-fold threshold.
/// Unscored pairs are left out of training and evaluation and counted.
inline EvalReport threshold_cross_validate(std::string method, const std::vector<SimilarityScore>& scores,
                                           const std::vector<int>& labels, const FoldSplit& split,
                                           std::string language, Timing shared = {}) {
  if (scores.size() != labels.size() || labels.size() != split.fold.size())
    throw LengthMismatch("scores, labels and folds differ in length");
  std::vector<FoldOutcome> folds(static_cast<std::size_t>(split.k));
  bool degenerate = false;
  for (int f = 0; f < split.k; ++f) {
    auto& o = folds[static_cast<std::size_t>(f)];
    Stopwatch train;
    std::vector<double> s;
    std::vector<int> y;
    for (auto i : split.train_indices(f))
      if (scores[i].scored) {
        s.push_back(scores[i].value);
        y.push_back(labels[i]);
      }
    auto fit = fit_threshold(s, y);
    degenerate |= fit.degenerate;
    o.timing.training = train.seconds();
    Stopwatch infer;
    for (auto i : split.test_indices(f)) {
      if (!scores[i].scored) {
        ++o.unscored;
        continue;
      }
      o.truth.push_back(labels[i]);
      o.pred.push_back(apply_threshold(scores[i].value, fit.threshold));
    }
    o.timing.inference = infer.seconds();
    o.details["threshold"] = fit.threshold;
    o.details["train_f1"] = fit.train_f1;
  }
  auto r = assemble_report(std::move(method), Task::Task1, std::move(language), folds);
  r.timing += shared;
  if (degenerate) r.details["warning"] = "degenerate scores: all training scores identical in some fold";
  return r;
}

}  // namespace lpcode

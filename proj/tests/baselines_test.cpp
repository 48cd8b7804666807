#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "lpcode/similarity.hpp"
#include "lpcode/tfidf.hpp"
#include "support/oracles.hpp"

namespace lpcode {
namespace {

std::string random_string(Rng& rng, std::size_t max_len, std::string_view alphabet = "abcd") {
  std::string s(rng.below(max_len + 1), ' ');
  for (auto& c : s) c = alphabet[rng.below(alphabet.size())];
  return s;
}

TEST(Levenshtein, Examples) {
  EXPECT_EQ(levenshtein_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein_distance("same", "same"), 0u);
  EXPECT_DOUBLE_EQ(levenshtein_similarity("same", "same"), 1.0);
  EXPECT_DOUBLE_EQ(levenshtein_similarity("", ""), 1.0);
  EXPECT_DOUBLE_EQ(levenshtein_similarity("abc", ""), 0.0);
}

TEST(Levenshtein, MatchesFullTable) {
  Rng rng(1);
  for (int t = 0; t < 500; ++t) {
    auto a = random_string(rng, 50), b = random_string(rng, 50);
    EXPECT_EQ(levenshtein_distance(a, b), oracle::levenshtein_full(a, b));
  }
}

TEST(Levenshtein, IsAMetric) {
  Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    auto a = random_string(rng, 12, "ab"), b = random_string(rng, 12, "ab"), c = random_string(rng, 12, "ab");
    auto ab = levenshtein_distance(a, b);
    EXPECT_EQ(ab, levenshtein_distance(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(levenshtein_distance(a, c), ab + levenshtein_distance(b, c));
  }
}

TEST(Jaccard, Examples) {
  EXPECT_DOUBLE_EQ(jaccard_similarity(TokenSet{"a", "b", "c"}, TokenSet{"b", "c", "d"}), 0.5);
  EXPECT_DOUBLE_EQ(jaccard_similarity(TokenSet{"a"}, TokenSet{"b"}), 0.0);
  EXPECT_DOUBLE_EQ(jaccard_similarity(TokenSet{}, TokenSet{}), 1.0);
  SourceUnit u{"u", Language::Java, Generator::Human, "", "class A { int x = 1; }\n"};
  EXPECT_DOUBLE_EQ(jaccard_similarity(u, u), 1.0);
  SourceUnit v{"v", Language::Java, Generator::ChatGPT, "u", "// note\nclass A { int x = 1; }\n"};
  EXPECT_DOUBLE_EQ(jaccard_similarity(u, v), 1.0);  // comments are not tokens
}

TEST(Jaccard, SymmetricBoundedAndExact) {
  Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::string> a, b;
    for (auto n = rng.below(6); n > 0; --n) a.push_back(random_string(rng, 2, "xy"));
    for (auto n = rng.below(6); n > 0; --n) b.push_back(random_string(rng, 2, "xy"));
    auto sa = token_set(a), sb = token_set(b);
    double s = jaccard_similarity(sa, sb);
    EXPECT_DOUBLE_EQ(s, jaccard_similarity(sb, sa));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(s == 1.0, sa == sb);
  }
}

TEST(TreeEdit, Examples) {
  LabeledTree a, b;
  a.add("x");
  b.add("y");
  EXPECT_EQ(tree_edit_distance(a, a), 0u);
  EXPECT_EQ(tree_edit_distance(a, b), 1u);
  LabeledTree c;
  auto r = c.add("f");
  c.add("a", r);
  c.add("b", r);
  // f(a, b) -> f(b): delete a
  LabeledTree d;
  d.add("b", d.add("f"));
  EXPECT_EQ(tree_edit_distance(c, d), 1u);
  EXPECT_DOUBLE_EQ(ted_similarity(c, c), 1.0);
}

TEST(TreeEdit, MatchesEditScriptSearch) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    auto a = oracle::random_tree(rng, 1 + rng.below(6), "abc");
    auto b = oracle::random_tree(rng, 1 + rng.below(6), "abc");
    EXPECT_EQ(tree_edit_distance(a, b), oracle::edit_script_distance(oracle::to_forest(a), oracle::to_forest(b)));
  }
}

TEST(TreeEdit, SymmetricAndBounded) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    auto a = oracle::random_tree(rng, 1 + rng.below(40), "abcd");
    auto b = oracle::random_tree(rng, 1 + rng.below(40), "abcd");
    auto d = tree_edit_distance(a, b);
    EXPECT_EQ(d, tree_edit_distance(b, a));
    EXPECT_EQ(tree_edit_distance(a, a), 0u);
    EXPECT_LE(d, a.size() + b.size());
    EXPECT_GE(ted_similarity(a, b), 0.0);
  }
}

TEST(TreeEdit, BudgetAndSyntaxTrees) {
  Rng rng(6);
  auto big = oracle::random_tree(rng, 50, "ab");
  EXPECT_THROW(tree_edit_distance(big, big, 49), TreeTooLarge);
  SourceUnit u{"u", Language::C, Generator::Human, "", "int f(int a) { return a + 1; }\n"};
  SourceUnit v{"v", Language::C, Generator::ChatGPT, "u", "int f(int a) { int b = a + 1; return b; }\n"};
  auto tu = labeled_tree(parse(u)), tv = labeled_tree(parse(v));
  EXPECT_EQ(tree_edit_distance(tu, tu), 0u);
  auto d = tree_edit_distance(tu, tv);
  EXPECT_GT(d, 0u);
  EXPECT_EQ(d, tree_edit_distance(tv, tu));
}

TEST(TfIdf, HandComputedIdf) {
  std::vector<TokenList> docs = {{"a", "b"}, {"a", "c"}, {"a", "a", "d"}};
  auto v = TfIdfVectorizer::fit(docs);
  EXPECT_EQ(v.vocabulary_size(), 4u);
  EXPECT_DOUBLE_EQ(*v.idf("a"), 1.0);
  EXPECT_NEAR(*v.idf("b"), 1 + std::log(2.0), 1e-15);
  EXPECT_FALSE(v.idf("z").has_value());
  auto x = v.transform(docs[2]);
  // a: 2 * 1, d: 1 * (1 + ln 2), then L2-normalized
  double wd = 1 + std::log(2.0), norm = std::sqrt(4 + wd * wd);
  ASSERT_EQ(x.nnz(), 2u);
  EXPECT_EQ(x.index, (std::vector<std::uint32_t>{0, 3}));
  EXPECT_NEAR(x.value[0], 2 / norm, 1e-15);
  EXPECT_NEAR(x.value[1], wd / norm, 1e-15);
}

TEST(TfIdf, EdgeCases) {
  EXPECT_THROW(TfIdfVectorizer::fit(std::vector<TokenList>{}), EmptyCorpus);
  auto v = TfIdfVectorizer::fit(std::vector<TokenList>{{"a"}, {"b"}});
  EXPECT_EQ(v.transform({}).nnz(), 0u);
  EXPECT_EQ(v.transform({"zzz"}).nnz(), 0u);
  EXPECT_EQ(v.transform({"a"}).dim, 2u);
}

TEST(TfIdf, UnitNormAndCosineRange) {
  Rng rng(7);
  std::vector<TokenList> docs(30);
  for (auto& d : docs)
    for (auto n = rng.below(20); n > 0; --n) d.push_back(random_string(rng, 2, "abc"));
  auto v = TfIdfVectorizer::fit(docs);
  for (const auto& d : docs) {
    auto x = v.transform(d);
    double n2 = dot(x, x);
    if (x.nnz()) {
      EXPECT_NEAR(n2, 1.0, 1e-12);
    } else {
      EXPECT_EQ(n2, 0.0);
    }
    for (const auto& e : docs) {
      double c = dot(x, v.transform(e));
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0 + 1e-12);
    }
  }
}

TEST(Threshold, SeparableScores) {
  std::vector<double> s = {0.9, 0.9, 0.1, 0.1};
  std::vector<int> y = {1, 1, 0, 0};
  auto fit = fit_threshold(s, y);
  EXPECT_GT(fit.threshold, 0.1);
  EXPECT_LT(fit.threshold, 0.9);
  EXPECT_DOUBLE_EQ(fit.train_f1, 100.0);
  EXPECT_FALSE(fit.degenerate);
}

TEST(Threshold, IdenticalScoresFallBackToAllPositive) {
  std::vector<double> s(6, 0.4);
  std::vector<int> y = {1, 0, 1, 0, 1, 0};
  auto fit = fit_threshold(s, y);
  EXPECT_TRUE(fit.degenerate);
  EXPECT_DOUBLE_EQ(fit.threshold, 0.4);
  std::vector<int> pred;
  for (double v : s) pred.push_back(apply_threshold(v, fit.threshold));
  EXPECT_DOUBLE_EQ(f1_score(y, pred), f1_score(y, std::vector<int>(6, 1)));
}

TEST(Threshold, NeverWorseThanAllPositiveAndMatchesSweep) {
  Rng rng(8);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> s;
    std::vector<int> y;
    for (auto n = 2 + rng.below(30); n > 0; --n) {
      s.push_back(static_cast<double>(rng.below(8)) / 8);
      y.push_back(static_cast<int>(rng.below(2)));
    }
    auto fit = fit_threshold(s, y);
    EXPECT_GE(fit.train_f1, f1_score(y, std::vector<int>(y.size(), 1)) - 1e-9);
    std::vector<int> pred;
    for (double v : s) pred.push_back(apply_threshold(v, fit.threshold));
    EXPECT_NEAR(f1_score(y, pred), fit.train_f1, 1e-9);
    // Brute force over every distinct score as a threshold.
    double best = 0;
    for (double c : s) {
      std::vector<int> p;
      for (double v : s) p.push_back(v >= c);
      best = std::max(best, f1_score(y, p));
    }
    EXPECT_NEAR(fit.train_f1, best, 1e-9);
  }
}

TEST(Threshold, TestScoresDoNotLeakIntoThresholds) {
  Rng rng(9);
  std::vector<CodePair> pairs;
  std::vector<SimilarityScore> scores;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    bool pos = i % 2 == 0;
    pairs.push_back({"h" + std::to_string(i), "c" + std::to_string(i), Language::C,
                     pos ? Task1Label::Paraphrase : Task1Label::Unrelated, std::nullopt});
    scores.push_back({SimilarityMethod::Jaccard, rng.uniform(0, 1) * 0.5 + (pos ? 0.4 : 0.0), 0, true});
    labels.push_back(pos);
  }
  auto split = kfold_split(pairs, 5, 3);
  auto base = threshold_cross_validate("jaccard", scores, labels, split, "c");
  for (int f = 0; f < 5; ++f) {
    auto moved = scores;
    for (auto i : split.test_indices(f)) moved[i].value = rng.uniform(0, 1);
    auto r = threshold_cross_validate("jaccard", moved, labels, split, "c");
    EXPECT_EQ(r.details["folds"][f]["threshold"], base.details["folds"][f]["threshold"]);
  }
  scores[0].scored = false;
  EXPECT_EQ(threshold_cross_validate("jaccard", scores, labels, split, "c").unscored, 1u);
}

TEST(TfIdfClassifier, LearnsSharedVocabulary) {
  // Units 0..59 are humans; paraphrase of h is unit 60 + h and shares its rare tokens.
  Rng rng(10);
  std::vector<TokenList> tokens(120);
  for (int h = 0; h < 60; ++h) {
    for (int k = 0; k < 6; ++k) {
      auto tok = "t" + std::to_string(h) + "_" + std::to_string(k);
      tokens[h].push_back(tok);
      tokens[60 + h].push_back(tok);
    }
    tokens[h].push_back("common");
    tokens[60 + h].push_back("common");
  }
  std::vector<std::pair<std::size_t, std::size_t>> unit_pairs;
  std::vector<CodePair> pairs;
  std::vector<int> labels;
  for (int h = 0; h < 60; ++h) {
    unit_pairs.emplace_back(h, 60 + h);
    pairs.push_back({"h" + std::to_string(h), "p" + std::to_string(h), Language::C, Task1Label::Paraphrase, std::nullopt});
    labels.push_back(1);
    unit_pairs.emplace_back(h, 60 + (h + 7) % 60);
    pairs.push_back({"h" + std::to_string(h), "q" + std::to_string(h), Language::C, Task1Label::Unrelated, std::nullopt});
    labels.push_back(0);
  }
  auto split = kfold_split(pairs, 5, 42);
  TrainConfig cfg;
  cfg.max_epochs = 40;
  auto r = tfidf_pair_classifier(unit_pairs, tokens, labels, Task::Task1, split, cfg, "c");
  EXPECT_EQ(r.method, "tfidf");
  EXPECT_EQ(r.pairs, 120u);
  EXPECT_GT(r.details["dimension_ratio_vs_style"].get<double>(), 1.0);
  auto again = tfidf_pair_classifier(unit_pairs, tokens, labels, Task::Task1, split, cfg, "c");
  EXPECT_EQ(r.to_json().dump(), again.to_json().dump());
}

TEST(Heatmap, DiagonalSymmetryAndMissingGenerator) {
  std::vector<TokenList> docs;
  std::vector<Generator> owners;
  Rng rng(11);
  for (auto g : kGenerators)
    for (int i = 0; i < 5; ++i) {
      TokenList d;
      for (int k = 0; k < 10; ++k) d.push_back(random_string(rng, 1, "abcdef") + std::string(to_string(g)).substr(0, 1));
      docs.push_back(d);
      owners.push_back(g);
    }
  auto h = generator_tfidf_heatmap(docs, owners, "c");
  ASSERT_EQ(h.similarity.size(), 5u);
  for (std::size_t a = 0; a < 5; ++a) {
    EXPECT_NEAR(h.similarity[a][a], 1.0, 1e-12);
    for (std::size_t b = 0; b < 5; ++b) EXPECT_DOUBLE_EQ(h.similarity[a][b], h.similarity[b][a]);
  }
  std::ostringstream csv;
  h.write_csv(csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "generator,human,chatgpt,gemini_pro,wizardcoder,deepseek_coder");
  docs.pop_back();
  owners.pop_back();
  std::erase(owners, Generator::DeepSeekCoder);
  docs.resize(owners.size());
  EXPECT_THROW(generator_tfidf_heatmap(docs, owners, "c"), MissingGenerator);
}

TEST(ScoreCsv, Layout) {
  std::vector<CodePair> pairs = {{"h", "c", Language::C, Task1Label::Paraphrase, Generator::ChatGPT},
                                 {"h", "d", Language::C, Task1Label::Unrelated, std::nullopt}};
  std::vector<SimilarityScore> scores = {{SimilarityMethod::TreeEdit, 0.75, 5, true},
                                         {SimilarityMethod::TreeEdit, 0, 0, false}};
  std::ostringstream out;
  write_scores_csv_header(out);
  write_scores_csv(out, pairs, scores);
  EXPECT_EQ(out.str(), "human_id,candidate_id,method,value,raw\nh,c,tree_edit,0.75,5\nh,d,tree_edit,,\n");
}

}  // namespace
}  // namespace lpcode

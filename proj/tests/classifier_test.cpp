#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lpcode/classifier.hpp"

namespace lpcode {
namespace {

TEST(Standardizer, Examples) {
  auto s = Standardizer::fit({{0, 5}, {2, 5}});
  auto a = s.apply(DenseVector{0, 5});
  auto b = s.apply(DenseVector{2, 5});
  EXPECT_DOUBLE_EQ(a[0], -1.0);
  EXPECT_DOUBLE_EQ(b[0], 1.0);
  EXPECT_DOUBLE_EQ(a[1], 5.0);  // constant column untouched
  EXPECT_DOUBLE_EQ(s.apply(DenseVector{7, 9})[1], 9.0);
  EXPECT_THROW(s.apply(DenseVector{1}), DimensionMismatch);
}

TEST(Standardizer, HeldOutDataNeverChangesFit) {
  Rng rng(1);
  std::vector<PairVector> vectors(40);
  for (auto& v : vectors)
    for (auto& x : v.flattened) x = rng.uniform(0, 3);
  std::vector<std::size_t> train(30), test(10);
  std::iota(train.begin(), train.end(), 0);
  std::iota(test.begin(), test.end(), 30);
  TrainConfig cfg;
  auto before = style_featurizer(vectors, cfg)(train, test);
  for (std::size_t i = 30; i < 40; ++i)
    for (auto& x : vectors[i].flattened) x = rng.uniform(100, 200);
  auto after = style_featurizer(vectors, cfg)(train, test);
  EXPECT_EQ(before.train, after.train);
  auto s = Standardizer::fit(std::vector<DenseVector>(before.train));
  for (std::size_t j = 0; j < 20; ++j) {
    EXPECT_NEAR(s.mean[j], 0.0, 1e-12);
    if (s.deviation[j] > 0) {
      EXPECT_NEAR(s.deviation[j], 1.0, 1e-12);
    }
  }
}

Mlp random_net(Rng& rng, std::size_t in, std::size_t hid, std::size_t out) {
  Mlp m(in, hid, out);
  for (auto& p : m.params()) p = rng.uniform(-1, 1);
  return m;
}

TEST(Mlp, SoftmaxSumsToOne) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    auto m = random_net(rng, 20, 1 + rng.below(30), 2 + rng.below(3));
    DenseVector x(20);
    for (auto& v : x) v = rng.uniform(-5, 5);
    auto p = m.predict_proba(x);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(Mlp, ZeroWeightsGiveUniformAndLowestTie) {
  Mlp m(20, 5, 4);
  auto p = m.predict_proba(DenseVector(20, 1.0));
  for (double v : p) EXPECT_DOUBLE_EQ(v, 0.25);
  EXPECT_EQ(m.predict(DenseVector(20, 1.0)), 0);
  EXPECT_THROW(m.predict(DenseVector(19, 1.0)), DimensionMismatch);
}

template <typename Row>
void gradient_check(const Mlp& base, const std::vector<Row>& rows, const std::vector<int>& labels, double l2) {
  std::vector<std::size_t> batch(rows.size());
  std::iota(batch.begin(), batch.end(), 0);
  std::vector<double> grad, unused;
  base.loss_and_gradient(rows, labels, batch, l2, grad);
  Mlp m = base;
  const double h = 1e-6;
  for (std::size_t k = 0; k < m.params().size(); ++k) {
    double keep = m.params()[k];
    m.params()[k] = keep + h;
    double up = m.loss_and_gradient(rows, labels, batch, l2, unused);
    m.params()[k] = keep - h;
    double down = m.loss_and_gradient(rows, labels, batch, l2, unused);
    m.params()[k] = keep;
    double numeric = (up - down) / (2 * h);
    double scale = std::max({std::fabs(numeric), std::fabs(grad[k]), 1e-6});
    EXPECT_LE(std::fabs(numeric - grad[k]) / scale, 1e-4) << "param " << k;
  }
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::size_t in = 2 + rng.below(19), hid = 1 + rng.below(10), out = 2 + rng.below(3);
    auto m = random_net(rng, in, hid, out);
    std::vector<DenseVector> rows(1 + rng.below(6), DenseVector(in));
    std::vector<int> labels;
    for (auto& r : rows) {
      for (auto& v : r) v = rng.uniform(-2, 2);
      labels.push_back(static_cast<int>(rng.below(out)));
    }
    gradient_check(m, rows, labels, t % 2 ? 1e-2 : 0.0);
  }
}

TEST(Mlp, SparseRowsMatchDenseRows) {
  Rng rng(4);
  auto m = random_net(rng, 12, 6, 3);
  std::vector<DenseVector> dense;
  std::vector<SparseVector> sparse;
  std::vector<int> labels;
  for (int i = 0; i < 5; ++i) {
    DenseVector d(12, 0.0);
    SparseVector s;
    s.dim = 12;
    for (std::uint32_t j = 0; j < 12; ++j)
      if (rng.below(3) == 0) {
        d[j] = rng.uniform(0, 1);
        s.index.push_back(j);
        s.value.push_back(d[j]);
      }
    dense.push_back(d);
    sparse.push_back(s);
    labels.push_back(static_cast<int>(rng.below(3)));
  }
  gradient_check(m, sparse, labels, 1e-3);
  std::vector<std::size_t> batch = {0, 1, 2, 3, 4};
  std::vector<double> gd, gs;
  EXPECT_DOUBLE_EQ(m.loss_and_gradient(dense, labels, batch, 1e-3, gd), m.loss_and_gradient(sparse, labels, batch, 1e-3, gs));
  EXPECT_EQ(gd, gs);
}

std::pair<std::vector<DenseVector>, std::vector<int>> separable_set(Rng& rng, std::size_t n) {
  DenseVector w(20);
  double norm = 0;
  for (auto& v : w) {
    v = rng.uniform(-1, 1);
    norm += v * v;
  }
  for (auto& v : w) v /= std::sqrt(norm);
  std::vector<DenseVector> rows;
  std::vector<int> labels;
  while (rows.size() < n) {
    DenseVector x(20);
    double s = 0;
    for (std::size_t j = 0; j < 20; ++j) {
      x[j] = rng.uniform(-3, 3);
      s += x[j] * w[j];
    }
    if (std::fabs(s) < 1) continue;  // margin 1
    rows.push_back(x);
    labels.push_back(s > 0);
  }
  return {rows, labels};
}

TEST(TrainMlp, SeparableSetIsLearned) {
  Rng rng(5);
  auto [rows, labels] = separable_set(rng, 300);
  MlpTrainOptions opt;
  auto fit = train_mlp(rows, labels, 2, opt);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) correct += fit.model.predict(rows[i]) == labels[i];
  EXPECT_EQ(correct, rows.size());
  EXPECT_LE(fit.loss_curve.back(), fit.loss_curve.front());
  EXPECT_LE(fit.loss_curve.size(), 200u);
}

TEST(TrainMlp, DeterministicPerSeed) {
  Rng rng(6);
  auto [rows, labels] = separable_set(rng, 100);
  MlpTrainOptions opt;
  opt.max_epochs = 20;
  EXPECT_EQ(train_mlp(rows, labels, 2, opt).model.params(), train_mlp(rows, labels, 2, opt).model.params());
  auto other = opt;
  other.seed = 43;
  EXPECT_NE(train_mlp(rows, labels, 2, opt).model.params(), train_mlp(rows, labels, 2, other).model.params());
}

TEST(TrainMlp, InputErrors) {
  std::vector<DenseVector> rows = {{1, 2}, {3, 4}};
  EXPECT_THROW(train_mlp(rows, std::vector<int>{1, 1}, 2, {}), SingleClassInput);
  EXPECT_THROW(train_mlp(std::vector<DenseVector>{{1, NAN}, {3, 4}}, std::vector<int>{0, 1}, 2, {}), NonFiniteFeature);
  EXPECT_THROW(train_mlp(std::vector<DenseVector>{{1}, {3, 4}}, std::vector<int>{0, 1}, 2, {}), DimensionMismatch);
}

TEST(Metrics, F1Examples) {
  EXPECT_DOUBLE_EQ(f1_score({1, 0, 1}, {1, 0, 1}), 100.0);
  // precision 0.5, recall 1.0
  EXPECT_NEAR(f1_score({1, 0}, {1, 1}), 66.666666666666667, 1e-9);
  EXPECT_DOUBLE_EQ(f1_score({1, 1, 0}, {0, 0, 0}), 0.0);
  EXPECT_THROW(f1_score({1}, {1, 0}), LengthMismatch);
}

TEST(Metrics, MatchScikitLearn) {
  std::vector<int> t = {1, 2, 3, 3, 0, 0, 3, 3, 0, 1, 3, 1, 1, 3, 1, 1, 2, 2, 0, 0,
                        3, 3, 3, 2, 3, 1, 1, 3, 0, 1, 0, 1, 3, 0, 1, 1, 3, 0, 2, 1};
  std::vector<int> p = {0, 3, 0, 1, 1, 1, 0, 3, 2, 3, 0, 2, 1, 2, 3, 1, 2, 0, 1, 3,
                        1, 2, 1, 0, 1, 2, 1, 3, 1, 2, 3, 3, 1, 0, 2, 2, 3, 1, 1, 0};
  EXPECT_NEAR(macro_f1(t, p, 4), 18.886342415754182, 1e-9);
  EXPECT_NEAR(class_metrics(confusion_matrix(t, p, 4), 1).f1, 22.22222222222222, 1e-9);
  std::vector<int> t2 = {0, 1, 1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1, 0, 0};
  std::vector<int> p2 = {0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  EXPECT_NEAR(f1_score(t2, p2), 57.89473684210527, 1e-9);
}

TEST(Metrics, ConfusionRowsSumToSupport) {
  std::vector<int> t = {0, 1, 1, 2, 3, 3, 3}, p = {0, 0, 1, 2, 3, 2, 1};
  auto m = confusion_matrix(t, p, 4);
  for (std::size_t c = 0; c < 4; ++c)
    EXPECT_EQ(std::accumulate(m[c].begin(), m[c].end(), 0L), std::count(t.begin(), t.end(), static_cast<int>(c)));
}

// Positives copy the human vector; negatives draw an unrelated one.
struct Synthetic {
  std::vector<PairVector> vectors;
  std::vector<CodePair> pairs;
  std::vector<int> labels;
};

Synthetic copy_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Synthetic s;
  auto draw = [&] {
    StyleVector v;
    std::vector<double> vals(10);
    for (auto& x : vals) x = rng.uniform(0, 1);
    return StyleVector::from_values(vals);
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto h = draw();
    bool pos = i % 2 == 0;
    s.vectors.push_back(pair_feature_vector(h, pos ? h : draw()));
    s.pairs.push_back({"h" + std::to_string(i), "c" + std::to_string(i), Language::C,
                       pos ? Task1Label::Paraphrase : Task1Label::Unrelated, std::nullopt});
    s.labels.push_back(pos);
  }
  return s;
}

TEST(CrossValidate, CopiedVectorsAreDetected) {
  auto s = copy_corpus(1000, 7);
  auto split = kfold_split(s.pairs, 5, 42);
  auto r = cross_validate(s.vectors, s.labels, Task::Task1, split, TrainConfig{}, "c");
  EXPECT_GT(r.mean_f1, 95.0);
  EXPECT_EQ(r.fold_f1.size(), 5u);
  EXPECT_EQ(r.pairs, 1000u);
  long total = 0;
  for (const auto& row : r.confusion) total += std::accumulate(row.begin(), row.end(), 0L);
  EXPECT_EQ(total, 1000);
  for (const auto& row : r.confusion_normalized) EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
}

TEST(CrossValidate, DeterministicReports) {
  auto s = copy_corpus(200, 8);
  auto split = kfold_split(s.pairs, 5, 42);
  TrainConfig cfg;
  cfg.max_epochs = 30;
  auto a = cross_validate(s.vectors, s.labels, Task::Task1, split, cfg, "c");
  auto b = cross_validate(s.vectors, s.labels, Task::Task1, split, cfg, "c", 0, 2);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(Ablation, MaskOfAllGroupsEqualsFullModel) {
  auto s = copy_corpus(200, 9);
  auto split = kfold_split(s.pairs, 5, 1);
  TrainConfig full;
  full.max_epochs = 30;
  TrainConfig groups = full;
  groups.feature_mask.clear();
  for (auto g : {FeatureGroup::Readability, FeatureGroup::Naming, FeatureGroup::Structure})
    for (auto& n : feature_group_names(g)) groups.feature_mask.push_back(n);
  auto a = cross_validate(s.vectors, s.labels, Task::Task1, split, full, "c");
  auto b = cross_validate(s.vectors, s.labels, Task::Task1, split, groups, "c");
  EXPECT_EQ(a.fold_f1, b.fold_f1);
  auto r = feature_group_ablation(s.vectors, s.labels, Task::Task1, split, full, FeatureGroup::Structure, "c");
  EXPECT_EQ(r.details["input_dim"], 6);
  EXPECT_EQ(r.method, "lpcodedec-structure");
}

TEST(Ablation, InvalidMask) {
  TrainConfig cfg;
  cfg.feature_mask = {};
  EXPECT_THROW(cfg.mask_indices(), InvalidUnit);
  cfg.feature_mask = {"bogus"};
  EXPECT_THROW(cfg.mask_indices(), InvalidUnit);
}

TEST(Detector, SerializationRoundTrip) {
  auto s = copy_corpus(120, 10);
  TrainConfig cfg;
  cfg.max_epochs = 10;
  auto d = Detector::train(s.vectors, s.labels, Task::Task1, cfg);
  auto back = Detector::from_json(nlohmann::json::parse(d.to_json().dump()));
  for (const auto& v : s.vectors) EXPECT_EQ(d.predict_proba(v), back.predict_proba(v));
  auto broken = d.to_json();
  broken["feature_mask"] = {"comment_ratio"};
  EXPECT_THROW(Detector::from_json(broken), FormatError);
}

}  // namespace
}  // namespace lpcode

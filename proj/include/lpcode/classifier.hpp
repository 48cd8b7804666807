#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lpcode/dataset.hpp"
#include "lpcode/errors.hpp"
#include "lpcode/mlp.hpp"
#include "lpcode/parallel.hpp"
#include "lpcode/style_features.hpp"
#include "lpcode/vectors.hpp"

namespace lpcode {

// ---------------------------------------------------------------------------
// Standardization

/// Per-column mean and population deviation from training rows. Columns
/// with zero deviation are passed through untouched.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> deviation;

  static Standardizer fit(const std::vector<DenseVector>& rows) {
    if (rows.empty()) throw EmptyInput("standardizer fitted on no rows");
    const std::size_t d = rows.front().size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.deviation.assign(d, 0.0);
    for (const auto& r : rows) {
      if (r.size() != d) throw DimensionMismatch("rows differ in dimension");
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    }
    const double n = static_cast<double>(rows.size());
    for (auto& m : s.mean) m /= n;
    for (const auto& r : rows)
      for (std::size_t j = 0; j < d; ++j) s.deviation[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
    for (auto& v : s.deviation) v = std::sqrt(v / n);
    return s;
  }

  DenseVector apply(const DenseVector& x) const {
    if (x.size() != mean.size()) throw DimensionMismatch("standardizer dimension mismatch");
    DenseVector out(x);
    for (std::size_t j = 0; j < x.size(); ++j)
      if (deviation[j] > 0) out[j] = (x[j] - mean[j]) / deviation[j];
    return out;
  }

  std::vector<DenseVector> apply(const std::vector<DenseVector>& rows) const {
    std::vector<DenseVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(apply(r));
    return out;
  }
};

// ---------------------------------------------------------------------------
// Configuration

struct TrainConfig {
  std::uint64_t seed = 42;
  std::size_t hidden_units = 100;
  double learning_rate = 1e-3;
  std::size_t max_epochs = 200;
  std::size_t batch_size = 32;
  bool standardize = true;
  std::vector<std::string> feature_mask{kFeatureNames.begin(), kFeatureNames.end()};
  double l2 = 1e-4;
  double tol = 1e-4;
  std::size_t patience = 10;

  MlpTrainOptions mlp_options(std::uint64_t fold_seed) const {
    MlpTrainOptions o;
    o.seed = fold_seed;
    o.hidden_units = hidden_units;
    o.learning_rate = learning_rate;
    o.max_epochs = max_epochs;
    o.batch_size = batch_size;
    o.l2 = l2;
    o.tol = tol;
    o.patience = patience;
    return o;
  }

  /// Style-feature indices selected by the mask, in canonical order.
  std::vector<std::size_t> mask_indices() const {
    if (feature_mask.empty()) throw InvalidUnit("feature mask is empty");
    std::vector<std::size_t> idx;
    for (const auto& name : feature_mask) {
      auto i = feature_index(name);
      if (!i) throw InvalidUnit("unknown feature '" + name + "'");
      idx.push_back(*i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["hidden_units"] = hidden_units;
    j["learning_rate"] = learning_rate;
    j["max_epochs"] = max_epochs;
    j["batch_size"] = batch_size;
    j["standardize"] = standardize;
    j["feature_mask"] = feature_mask;
    j["l2"] = l2;
    j["tol"] = tol;
    j["patience"] = patience;
    return j;
  }
};

inline std::vector<std::string> feature_group_names(FeatureGroup g) {
  std::vector<std::string> names;
  for (auto i : feature_group_indices(g)) names.emplace_back(kFeatureNames[i]);
  return names;
}

/// Masked pair vector: selected human features, then the same candidate features.
inline DenseVector masked_pair_vector(const PairVector& p, const std::vector<std::size_t>& mask) {
  DenseVector v;
  v.reserve(2 * mask.size());
  for (auto i : mask) v.push_back(p.flattened[i]);
  for (auto i : mask) v.push_back(p.flattened[i + kStyleDims]);
  return v;
}

// ---------------------------------------------------------------------------
// Metrics

enum class Task { Task1, Task2 };

inline std::string_view to_string(Task t) { return t == Task::Task1 ? "task1" : "task2"; }

inline std::size_t class_count(Task t) { return t == Task::Task1 ? 2 : kLlmGenerators.size(); }

inline std::vector<std::string> class_names(Task t) {
  if (t == Task::Task1) return {"unrelated", "paraphrase"};
  std::vector<std::string> names;
  for (auto g : kLlmGenerators) names.emplace_back(to_string(g));
  return names;
}

/// Class index of a pair for a task: paraphrase flag, or paraphrasing model.
inline int task_label(const CodePair& p, Task t) {
  if (t == Task::Task1) return static_cast<int>(p.task1_label);
  if (!p.task2_label) throw InvalidUnit("pair " + p.id() + " has no task-2 label");
  return llm_index(*p.task2_label);
}

using ConfusionMatrix = std::vector<std::vector<long>>;

inline ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& pred,
                                        std::size_t classes) {
  if (truth.size() != pred.size()) throw LengthMismatch("truth and prediction lengths differ");
  ConfusionMatrix m(classes, std::vector<long>(classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++m.at(static_cast<std::size_t>(truth[i])).at(static_cast<std::size_t>(pred[i]));
  return m;
}

struct ClassMetrics {
  double precision = 0, recall = 0, f1 = 0;  // percent
  long support = 0;
};

inline ClassMetrics class_metrics(const ConfusionMatrix& m, std::size_t c) {
  long tp = m[c][c], predicted = 0, actual = 0;
  for (std::size_t r = 0; r < m.size(); ++r) predicted += m[r][c];
  for (long v : m[c]) actual += v;
  ClassMetrics out;
  out.support = actual;
  double p = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  double r = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
  out.precision = 100 * p;
  out.recall = 100 * r;
  out.f1 = p + r > 0 ? 100 * 2 * p * r / (p + r) : 0.0;
  return out;
}

/// Binary F1 in percent for `positive`; 0 when precision + recall is 0.
inline double f1_score(const std::vector<int>& truth, const std::vector<int>& pred, int positive = 1) {
  if (truth.size() != pred.size()) throw LengthMismatch("truth and prediction lengths differ");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    bool t = truth[i] == positive, p = pred[i] == positive;
    tp += t && p;
    fp += !t && p;
    fn += t && !p;
  }
  if (tp == 0) return 0.0;
  double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 100 * 2 * precision * recall / (precision + recall);
}

/// Unweighted mean of per-class F1 over classes 0..classes-1, in percent.
inline double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred, std::size_t classes) {
  auto m = confusion_matrix(truth, pred, classes);
  double s = 0;
  for (std::size_t c = 0; c < classes; ++c) s += class_metrics(m, c).f1;
  return s / static_cast<double>(classes);
}

inline double task_f1(Task t, const std::vector<int>& truth, const std::vector<int>& pred) {
  return t == Task::Task1 ? f1_score(truth, pred, 1) : macro_f1(truth, pred, class_count(t));
}

// ---------------------------------------------------------------------------
// Reports

struct Timing {
  double preprocessing = 0, training = 0, inference = 0;
  double total() const { return preprocessing + training + inference; }

  Timing& operator+=(const Timing& o) {
    preprocessing += o.preprocessing;
    training += o.training;
    inference += o.inference;
    return *this;
  }

  nlohmann::ordered_json to_json() const {
    return {{"preprocessing_s", preprocessing}, {"training_s", training}, {"inference_s", inference},
            {"total_s", total()}};
  }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Evaluation of one method on one task and language. Timing is kept
/// apart from the deterministic payload and serialized separately.
struct EvalReport {
  std::string method;
  Task task = Task::Task1;
  std::string language;
  int folds = 0;
  std::size_t pairs = 0;
  std::size_t unscored = 0;
  std::vector<double> fold_f1;
  double mean_f1 = 0;
  std::vector<std::string> classes;
  std::vector<ClassMetrics> per_class;
  ConfusionMatrix confusion;
  std::vector<std::vector<double>> confusion_normalized;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  Timing timing;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["method"] = method;
    j["task"] = to_string(task);
    j["language"] = language;
    j["folds"] = folds;
    j["pairs"] = pairs;
    j["unscored_pairs"] = unscored;
    j["fold_f1"] = fold_f1;
    j["mean_f1"] = mean_f1;
    auto pc = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < classes.size(); ++c)
      pc.push_back({{"class", classes[c]},
                    {"precision", per_class[c].precision},
                    {"recall", per_class[c].recall},
                    {"f1", per_class[c].f1},
                    {"support", per_class[c].support}});
    j["per_class"] = pc;
    j["confusion_matrix"] = {{"labels", classes}, {"counts", confusion}, {"row_normalized", confusion_normalized}};
    j["details"] = details;
    return j;
  }

  /// `true\predicted` header row followed by one row per true class.
  std::string confusion_csv() const {
    std::string s = "true\\predicted";
    for (const auto& c : classes) s += "," + c;
    s += "\n";
    for (std::size_t r = 0; r < classes.size(); ++r) {
      s += classes[r];
      for (long v : confusion[r]) s += "," + std::to_string(v);
      s += "\n";
    }
    return s;
  }
};

/// Outcome of one fold: true and predicted labels of its scored test pairs.
struct FoldOutcome {
  std::vector<int> truth;
  std::vector<int> pred;
  std::size_t unscored = 0;
  Timing timing;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

/// Per-fold F1 and their mean; confusion counts summed over folds, then
/// row-normalized.
inline EvalReport assemble_report(std::string method, Task task, std::string language,
                                  const std::vector<FoldOutcome>& folds) {
  EvalReport r;
  r.method = std::move(method);
  r.task = task;
  r.language = std::move(language);
  r.folds = static_cast<int>(folds.size());
  r.classes = class_names(task);
  const auto k = class_count(task);
  r.confusion.assign(k, std::vector<long>(k, 0));
  auto fold_details = nlohmann::ordered_json::array();
  for (const auto& f : folds) {
    r.pairs += f.truth.size() + f.unscored;
    r.unscored += f.unscored;
    r.fold_f1.push_back(task_f1(task, f.truth, f.pred));
    auto m = confusion_matrix(f.truth, f.pred, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) r.confusion[a][b] += m[a][b];
    r.timing += f.timing;
    if (!f.details.empty()) fold_details.push_back(f.details);
  }
  double s = 0;
  for (double v : r.fold_f1) s += v;
  r.mean_f1 = r.fold_f1.empty() ? 0.0 : s / static_cast<double>(r.fold_f1.size());
  for (std::size_t c = 0; c < k; ++c) r.per_class.push_back(class_metrics(r.confusion, c));
  for (const auto& row : r.confusion) {
    long total = 0;
    for (long v : row) total += v;
    std::vector<double> norm;
    for (long v : row) norm.push_back(total ? static_cast<double>(v) / static_cast<double>(total) : 0.0);
    r.confusion_normalized.push_back(std::move(norm));
  }
  if (!fold_details.empty()) r.details["folds"] = fold_details;
  return r;
}

// ---------------------------------------------------------------------------
// Cross-validation

template <typename Row>
struct FoldFeatures {
  std::vector<Row> train;
  std::vector<Row> test;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

/// Runs every fold: `featurize(train_idx, test_idx)` builds the rows (its
/// time counts as preprocessing), then an MLP is trained and evaluated.
/// Fold f trains with seed derive(cfg.seed, f).
template <typename Row, typename Featurize>
std::vector<FoldOutcome> cross_validate_mlp(const std::vector<int>& labels, std::size_t classes,
                                            const FoldSplit& split, const TrainConfig& cfg, Featurize&& featurize,
                                            unsigned jobs = 1) {
  if (labels.size() != split.fold.size()) throw LengthMismatch("labels and fold assignment differ in length");
  std::vector<FoldOutcome> out(static_cast<std::size_t>(split.k));
  parallel_for(out.size(), jobs, [&](std::size_t f) {
    auto& o = out[f];
    auto train_idx = split.train_indices(static_cast<int>(f));
    auto test_idx = split.test_indices(static_cast<int>(f));
    Stopwatch prep;
    FoldFeatures<Row> data = featurize(train_idx, test_idx);
    o.timing.preprocessing = prep.seconds();
    std::vector<int> y;
    for (auto i : train_idx) y.push_back(labels[i]);
    Stopwatch train;
    auto fit = train_mlp(data.train, y, classes, cfg.mlp_options(Rng::derive(cfg.seed, f).next()));
    o.timing.training = train.seconds();
    Stopwatch infer;
    for (std::size_t t = 0; t < test_idx.size(); ++t) {
      o.truth.push_back(labels[test_idx[t]]);
      o.pred.push_back(fit.model.predict(data.test[t]));
    }
    o.timing.inference = infer.seconds();
    o.details = std::move(data.details);
    o.details["epochs"] = fit.loss_curve.size();
    o.details["final_loss"] = fit.loss_curve.empty() ? 0.0 : fit.loss_curve.back();
  });
  return out;
}

/// Masked style-feature featurizer with optional train-fold standardization.
inline auto style_featurizer(const std::vector<PairVector>& vectors, const TrainConfig& cfg) {
  return [&vectors, mask = cfg.mask_indices(), standardize = cfg.standardize](
             const std::vector<std::size_t>& train_idx, const std::vector<std::size_t>& test_idx) {
    FoldFeatures<DenseVector> d;
    for (auto i : train_idx) d.train.push_back(masked_pair_vector(vectors[i], mask));
    for (auto i : test_idx) d.test.push_back(masked_pair_vector(vectors[i], mask));
    if (standardize) {
      auto s = Standardizer::fit(d.train);
      d.train = s.apply(d.train);
      d.test = s.apply(d.test);
    }
    return d;
  };
}

/// The style-feature detector evaluated by k-fold cross-validation.
/// `extraction` is the time spent computing style vectors.
inline EvalReport cross_validate(const std::vector<PairVector>& vectors, const std::vector<int>& labels, Task task,
                                 const FoldSplit& split, const TrainConfig& cfg, std::string language,
                                 double extraction = 0, unsigned jobs = 1, std::string method = "lpcodedec") {
  if (vectors.size() != labels.size()) throw LengthMismatch("vectors and labels differ in length");
  auto folds = cross_validate_mlp<DenseVector>(labels, class_count(task), split, cfg, style_featurizer(vectors, cfg), jobs);
  auto r = assemble_report(std::move(method), task, std::move(language), folds);
  r.timing.preprocessing += extraction;
  r.details["feature_mask"] = cfg.feature_mask;
  r.details["input_dim"] = 2 * cfg.mask_indices().size();
  return r;
}

inline EvalReport feature_group_ablation(const std::vector<PairVector>& vectors, const std::vector<int>& labels,
                                         Task task, const FoldSplit& split, TrainConfig cfg, FeatureGroup group,
                                         std::string language, double extraction = 0, unsigned jobs = 1) {
  cfg.feature_mask = feature_group_names(group);
  return cross_validate(vectors, labels, task, split, cfg, std::move(language), extraction, jobs,
                        "lpcodedec-" + std::string(to_string(group)));
}

// ---------------------------------------------------------------------------
// Trained detector

/// A trained style-feature classifier with everything needed to reuse it.
struct Detector {
  Task task = Task::Task1;
  TrainConfig config;
  std::vector<std::size_t> mask;
  std::optional<Standardizer> standardizer;
  Mlp model;

  static Detector train(const std::vector<PairVector>& vectors, const std::vector<int>& labels, Task task,
                        const TrainConfig& cfg) {
    Detector d;
    d.task = task;
    d.config = cfg;
    d.mask = cfg.mask_indices();
    std::vector<DenseVector> rows;
    for (const auto& v : vectors) rows.push_back(masked_pair_vector(v, d.mask));
    if (cfg.standardize) {
      d.standardizer = Standardizer::fit(rows);
      rows = d.standardizer->apply(rows);
    }
    d.model = train_mlp(rows, labels, class_count(task), cfg.mlp_options(cfg.seed)).model;
    return d;
  }

  std::vector<double> predict_proba(const PairVector& v) const {
    auto x = masked_pair_vector(v, mask);
    if (standardizer) x = standardizer->apply(x);
    return model.predict_proba(x);
  }

  int predict(const PairVector& v) const {
    auto p = predict_proba(v);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "lpcodedec-model";
    j["version"] = 1;
    j["task"] = to_string(task);
    j["seed"] = config.seed;
    j["feature_mask"] = config.feature_mask;
    j["standardizer"] = standardizer ? nlohmann::json{{"mean", standardizer->mean}, {"deviation", standardizer->deviation}}
                                     : nlohmann::json(nullptr);
    j["network"] = model.to_json();
    return j;
  }

  static Detector from_json(const nlohmann::json& j) {
    try {
      if (j.at("format") != "lpcodedec-model" || j.at("version") != 1) throw FormatError("unsupported model file");
      Detector d;
      d.task = j.at("task") == "task1" ? Task::Task1 : Task::Task2;
      d.config.seed = j.at("seed").get<std::uint64_t>();
      d.config.feature_mask = j.at("feature_mask").get<std::vector<std::string>>();
      d.mask = d.config.mask_indices();
      d.config.standardize = !j.at("standardizer").is_null();
      if (d.config.standardize)
        d.standardizer = Standardizer{j["standardizer"].at("mean").get<std::vector<double>>(),
                                      j["standardizer"].at("deviation").get<std::vector<double>>()};
      d.model = Mlp::from_json(j.at("network"));
      if (d.model.inputs() != 2 * d.mask.size() || d.model.classes() != class_count(d.task))
        throw FormatError("network shape does not match mask and task");
      d.config.hidden_units = d.model.hidden();
      return d;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("model file: ") + e.what());
    }
  }
};

}  // namespace lpcode

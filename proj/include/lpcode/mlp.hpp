#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include <json.hpp>

#include "lpcode/errors.hpp"
#include "lpcode/random.hpp"
#include "lpcode/vectors.hpp"

namespace lpcode {

struct MlpTrainOptions {
  std::uint64_t seed = 42;
  std::size_t hidden_units = 100;
  double learning_rate = 1e-3;
  std::size_t max_epochs = 200;
  std::size_t batch_size = 32;
  double l2 = 1e-4;         // penalty 0.5 * l2 * |W|^2 / batch, weights only
  double tol = 1e-4;        // minimum epoch-loss improvement
  std::size_t patience = 10;  // epochs without improvement before stopping
};

/// Input -> ReLU hidden layer -> softmax. Parameters live in one flat
/// array: W1 (input-major), b1, W2 (hidden-major), b2.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t inputs, std::size_t hidden, std::size_t classes)
      : in_(inputs), hid_(hidden), out_(classes), params_(inputs * hidden + hidden + hidden * classes + classes, 0.0) {}

  std::size_t inputs() const { return in_; }
  std::size_t hidden() const { return hid_; }
  std::size_t classes() const { return out_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::size_t w1() const { return 0; }
  std::size_t b1() const { return in_ * hid_; }
  std::size_t w2() const { return b1() + hid_; }
  std::size_t b2() const { return w2() + hid_ * out_; }

  /// Glorot-uniform weights and biases, bound sqrt(6 / (fan_in + fan_out)).
  void initialize(Rng& rng) {
    auto fill = [&](std::size_t from, std::size_t count, double bound) {
      for (std::size_t i = from; i < from + count; ++i) params_[i] = rng.uniform(-bound, bound);
    };
    double a = std::sqrt(6.0 / static_cast<double>(in_ + hid_));
    double b = std::sqrt(6.0 / static_cast<double>(hid_ + out_));
    fill(w1(), in_ * hid_, a);
    fill(b1(), hid_, a);
    fill(w2(), hid_ * out_, b);
    fill(b2(), out_, b);
  }

  template <typename Row>
  void check_row(const Row& x) const {
    if (dimension(x) != in_)
      throw DimensionMismatch("input has " + std::to_string(dimension(x)) + " features, model expects " +
                              std::to_string(in_));
  }

  /// Hidden pre-activations and output probabilities for one row.
  template <typename Row>
  void forward(const Row& x, std::span<double> z1, std::span<double> prob) const {
    const double* p = params_.data();
    std::copy(p + b1(), p + b1() + hid_, z1.begin());
    for_each_nonzero(x, [&](std::size_t j, double v) {
      const double* w = p + w1() + j * hid_;
      for (std::size_t h = 0; h < hid_; ++h) z1[h] += v * w[h];
    });
    std::copy(p + b2(), p + b2() + out_, prob.begin());
    for (std::size_t h = 0; h < hid_; ++h) {
      double a = std::max(z1[h], 0.0);
      if (a == 0) continue;
      const double* w = p + w2() + h * out_;
      for (std::size_t c = 0; c < out_; ++c) prob[c] += a * w[c];
    }
    double mx = *std::max_element(prob.begin(), prob.end());
    double sum = 0;
    for (auto& v : prob) sum += (v = std::exp(v - mx));
    for (auto& v : prob) v /= sum;
  }

  template <typename Row>
  std::vector<double> predict_proba(const Row& x) const {
    check_row(x);
    std::vector<double> z1(hid_), prob(out_);
    forward(x, z1, prob);
    return prob;
  }

  /// Argmax; ties go to the lower class index.
  template <typename Row>
  int predict(const Row& x) const {
    auto p = predict_proba(x);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  }

  /// Mean cross-entropy over `batch` plus the L2 term; writes the full
  /// gradient into `grad` (resized to the parameter count).
  template <typename Row>
  double loss_and_gradient(const std::vector<Row>& rows, const std::vector<int>& labels,
                           std::span<const std::size_t> batch, double l2, std::vector<double>& grad) const {
    grad.assign(params_.size(), 0.0);
    const double n = static_cast<double>(batch.size());
    const double* p = params_.data();
    std::vector<double> z1(hid_), prob(out_), d1(hid_);
    double loss = 0;
    for (std::size_t i : batch) {
      const auto& x = rows[i];
      forward(x, z1, prob);
      const auto y = static_cast<std::size_t>(labels[i]);
      loss -= std::log(std::max(prob[y], std::numeric_limits<double>::min()));
      // d loss / d logits = (p - onehot) / n
      for (std::size_t c = 0; c < out_; ++c) prob[c] = (prob[c] - (c == y ? 1.0 : 0.0)) / n;
      for (std::size_t c = 0; c < out_; ++c) grad[b2() + c] += prob[c];
      for (std::size_t h = 0; h < hid_; ++h) {
        double a = std::max(z1[h], 0.0);
        const double* w = p + w2() + h * out_;
        double* g = grad.data() + w2() + h * out_;
        double back = 0;
        for (std::size_t c = 0; c < out_; ++c) {
          g[c] += a * prob[c];
          back += w[c] * prob[c];
        }
        d1[h] = z1[h] > 0 ? back : 0.0;
        grad[b1() + h] += d1[h];
      }
      for_each_nonzero(x, [&](std::size_t j, double v) {
        double* g = grad.data() + w1() + j * hid_;
        for (std::size_t h = 0; h < hid_; ++h) g[h] += v * d1[h];
      });
    }
    loss /= n;
    double sq = 0;
    auto penalize = [&](std::size_t from, std::size_t count) {
      for (std::size_t k = from; k < from + count; ++k) {
        sq += params_[k] * params_[k];
        grad[k] += l2 * params_[k] / n;
      }
    };
    penalize(w1(), in_ * hid_);
    penalize(w2(), hid_ * out_);
    return loss + 0.5 * l2 * sq / n;
  }

  nlohmann::json to_json() const {
    return {{"layers", {in_, hid_, out_}}, {"activation", "relu"}, {"output", "softmax"}, {"params", params_}};
  }

  static Mlp from_json(const nlohmann::json& j) {
    auto layers = j.at("layers").get<std::vector<std::size_t>>();
    if (layers.size() != 3) throw FormatError("model must have exactly three layers");
    Mlp m(layers[0], layers[1], layers[2]);
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != m.params_.size()) throw FormatError("parameter count does not match layer sizes");
    m.params_ = std::move(params);
    return m;
  }

 private:
  std::size_t in_ = 0, hid_ = 0, out_ = 0;
  std::vector<double> params_;
};

struct MlpFit {
  Mlp model;
  std::vector<double> loss_curve;  // mean training loss per epoch
};

/// Mini-batch Adam on the cross-entropy loss. Deterministic for a seed.
template <typename Row>
MlpFit train_mlp(const std::vector<Row>& rows, const std::vector<int>& labels, std::size_t classes,
                 const MlpTrainOptions& opt) {
  if (rows.size() != labels.size()) throw LengthMismatch("rows and labels differ in length");
  if (rows.empty()) throw SingleClassInput("no training rows");
  if (opt.hidden_units == 0 || !(opt.learning_rate > 0) || opt.batch_size == 0)
    throw InvalidUnit("invalid training configuration");
  const std::size_t dim = dimension(rows.front());
  std::set<int> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (dimension(rows[i]) != dim) throw DimensionMismatch("rows differ in dimension");
    for_each_nonzero(rows[i], [&](std::size_t, double v) {
      if (!std::isfinite(v)) throw NonFiniteFeature("row " + std::to_string(i) + " has a non-finite value");
    });
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
      throw InvalidUnit("label " + std::to_string(labels[i]) + " out of range");
    seen.insert(labels[i]);
  }
  if (seen.size() < 2) throw SingleClassInput("training labels contain a single class");

  Rng rng(opt.seed);
  MlpFit fit{Mlp(dim, opt.hidden_units, classes), {}};
  auto& model = fit.model;
  model.initialize(rng);

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  auto& w = model.params();
  std::vector<double> m(w.size(), 0.0), v(w.size(), 0.0), grad;
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < opt.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0;
    for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
      std::span<const std::size_t> batch(order.data() + start, std::min(opt.batch_size, order.size() - start));
      total += model.loss_and_gradient(rows, labels, batch, opt.l2, grad) * static_cast<double>(batch.size());
      ++step;
      const double lr = opt.learning_rate * std::sqrt(1 - std::pow(kBeta2, static_cast<double>(step))) /
                        (1 - std::pow(kBeta1, static_cast<double>(step)));
      for (std::size_t k = 0; k < w.size(); ++k) {
        m[k] = kBeta1 * m[k] + (1 - kBeta1) * grad[k];
        v[k] = kBeta2 * v[k] + (1 - kBeta2) * grad[k] * grad[k];
        w[k] -= lr * m[k] / (std::sqrt(v[k]) + kEps);
      }
    }
    double loss = total / static_cast<double>(order.size());
    if (!std::isfinite(loss)) throw NonFiniteFeature("training diverged");
    fit.loss_curve.push_back(loss);
    stale = loss > best - opt.tol ? stale + 1 : 0;
    best = std::min(best, loss);
    if (stale > opt.patience) break;
  }
  return fit;
}

}  // namespace lpcode

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ggs/ggs.hpp"

namespace ggs::test {

/// sum_d s (x_d - c_d)^2 with s = +1 or -1.
class QuadraticOracle final : public GradientOracle {
 public:
  QuadraticOracle(Vec center, double s) : center_(std::move(center)), s_(s) {}
  [[nodiscard]] std::size_t input_dim() const override { return center_.size(); }
  [[nodiscard]] std::size_t num_classes() const override { return 1; }
  [[nodiscard]] double loss(std::span<const double> x, std::size_t label) const override {
    check_input(x, label);
    double l = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) l += s_ * (x[d] - center_[d]) * (x[d] - center_[d]);
    return l;
  }
  [[nodiscard]] LossGrad loss_and_gradient(std::span<const double> x, std::size_t label) const override {
    LossGrad out{loss(x, label), Vec(x.size())};
    for (std::size_t d = 0; d < x.size(); ++d) out.gradient[d] = 2.0 * s_ * (x[d] - center_[d]);
    return out;
  }

 private:
  Vec center_;
  double s_;
};

class ConstantOracle final : public GradientOracle {
 public:
  ConstantOracle(std::size_t dim, double value) : dim_(dim), value_(value) {}
  [[nodiscard]] std::size_t input_dim() const override { return dim_; }
  [[nodiscard]] std::size_t num_classes() const override { return 1; }
  [[nodiscard]] double loss(std::span<const double>, std::size_t) const override { return value_; }
  [[nodiscard]] LossGrad loss_and_gradient(std::span<const double> x, std::size_t) const override {
    return {value_, Vec(x.size(), 0.0)};
  }

 private:
  std::size_t dim_;
  double value_;
};

/// Linear loss w.x that returns NaN gradients after `good_calls` evaluations.
class FailingOracle final : public GradientOracle {
 public:
  FailingOracle(std::size_t dim, int good_calls) : dim_(dim), good_calls_(good_calls) {}
  [[nodiscard]] std::size_t input_dim() const override { return dim_; }
  [[nodiscard]] std::size_t num_classes() const override { return 1; }
  [[nodiscard]] double loss(std::span<const double> x, std::size_t) const override {
    double s = 0.0;
    for (double e : x) s += e;
    return s;
  }
  [[nodiscard]] LossGrad loss_and_gradient(std::span<const double> x, std::size_t label) const override {
    const int call = calls_++;
    const double g = call < good_calls_ ? 1.0 : std::numeric_limits<double>::quiet_NaN();
    return {loss(x, label), Vec(x.size(), g)};
  }

 private:
  std::size_t dim_;
  int good_calls_;
  mutable std::atomic<int> calls_{0};
};

/// Random linear softmax classifier.
inline LinearSoftmaxOracle random_linear(std::size_t in, std::size_t out, std::uint64_t seed, double scale = 2.0) {
  CounterRng rng(seed);
  LinearLayer layer{in, out, Vec(in * out), Vec(out)};
  rng.fill_uniform(layer.weights, -scale, scale);
  rng.fill_uniform(layer.bias, -scale, scale);
  return LinearSoftmaxOracle(std::move(layer));
}

inline ToyModel random_model(std::vector<std::size_t> widths, Activation act, std::uint64_t seed) {
  ToyModel m = initialize_model(std::move(widths), act, seed);
  CounterRng rng(seed, 9);
  for (double& p : m.parameters) p += rng.uniform(-0.3, 0.3);
  return m;
}

inline Vec random_point(std::size_t dim, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  CounterRng rng(seed, 77);
  Vec x(dim);
  rng.fill_uniform(x, lo, hi);
  return x;
}

}  // namespace ggs::test

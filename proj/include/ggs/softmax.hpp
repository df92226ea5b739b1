#pragma once

#include "ggs/core.hpp"
#include "ggs/oracle.hpp"

namespace ggs {

/// Numerically stable softmax probabilities.
inline Vec softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  Vec p(logits.size());
  double z = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - top);
    z += p[k];
  }
  for (double& e : p) e /= z;
  return p;
}

/// Cross-entropy of softmax(logits) at `label`, computed as logsumexp - logit.
inline double cross_entropy(std::span<const double> logits, std::size_t label) {
  require(label < logits.size(), "cross_entropy: invalid label");
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - top);
  return top + std::log(z) - logits[label];
}

/// Row-major K x D weight matrix plus bias.
struct LinearLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  Vec weights;  // out x in, row-major
  Vec bias;     // out

  [[nodiscard]] Vec forward(std::span<const double> x) const {
    Vec y(bias);
    for (std::size_t r = 0; r < out; ++r) {
      const double* row = weights.data() + r * in;
      double s = 0.0;
      for (std::size_t c = 0; c < in; ++c) s += row[c] * x[c];
      y[r] += s;
    }
    return y;
  }

  /// W^T delta
  [[nodiscard]] Vec backward(std::span<const double> delta) const {
    Vec g(in, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      const double* row = weights.data() + r * in;
      for (std::size_t c = 0; c < in; ++c) g[c] += row[c] * delta[r];
    }
    return g;
  }
};

/// Cross-entropy of softmax(Wx + b) and its input gradient W^T (p - onehot).
inline LossGrad softmax_ce_loss_grad(const LinearLayer& layer, std::span<const double> x, std::size_t label) {
  require(x.size() == layer.in, "softmax_ce_loss_grad: input dimension mismatch");
  require(label < layer.out, "softmax_ce_loss_grad: invalid label");
  const Vec logits = layer.forward(x);
  Vec delta = softmax(logits);
  delta[label] -= 1.0;
  return {cross_entropy(logits, label), layer.backward(delta)};
}

class LinearSoftmaxOracle final : public Classifier {
 public:
  explicit LinearSoftmaxOracle(LinearLayer layer) : layer_(std::move(layer)) {
    require(layer_.weights.size() == layer_.in * layer_.out, "linear softmax: weight size mismatch");
    require(layer_.bias.size() == layer_.out, "linear softmax: bias size mismatch");
    require(layer_.out >= 1, "linear softmax: at least one class");
  }

  [[nodiscard]] std::size_t input_dim() const override { return layer_.in; }
  [[nodiscard]] std::size_t num_classes() const override { return layer_.out; }
  [[nodiscard]] const LinearLayer& layer() const { return layer_; }

  [[nodiscard]] Vec logits(std::span<const double> x) const override {
    require(x.size() == layer_.in, "linear softmax: input dimension mismatch");
    return layer_.forward(x);
  }
  [[nodiscard]] double loss(std::span<const double> x, std::size_t label) const override {
    check_input(x, label);
    return cross_entropy(layer_.forward(x), label);
  }
  [[nodiscard]] LossGrad loss_and_gradient(std::span<const double> x, std::size_t label) const override {
    check_input(x, label);
    return softmax_ce_loss_grad(layer_, x, label);
  }

 private:
  LinearLayer layer_;
};

}  // namespace ggs

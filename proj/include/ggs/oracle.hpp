#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ggs/core.hpp"
#include "ggs/rng.hpp"

namespace ggs {

struct LossGrad {
  double loss = 0.0;
  Vec gradient;
};

/// Differentiable loss L(x, label) and its input gradient. Implementations
/// are immutable after construction and safe for concurrent evaluation.
/// Inputs slightly outside the valid box must still produce finite values,
/// since attack sampling points are never clipped.
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;

  [[nodiscard]] virtual std::size_t input_dim() const = 0;
  [[nodiscard]] virtual std::size_t num_classes() const = 0;
  [[nodiscard]] virtual double loss(std::span<const double> x, std::size_t label) const = 0;
  [[nodiscard]] virtual LossGrad loss_and_gradient(std::span<const double> x, std::size_t label) const = 0;

  [[nodiscard]] Vec gradient(std::span<const double> x, std::size_t label) const {
    return loss_and_gradient(x, label).gradient;
  }

 protected:
  void check_input(std::span<const double> x, std::size_t label) const {
    require(x.size() == input_dim(), "oracle: input has " + std::to_string(x.size()) + " values, expected " +
                                         std::to_string(input_dim()));
    require(label < num_classes(), "oracle: label " + std::to_string(label) + " out of range for " +
                                       std::to_string(num_classes()) + " classes");
  }
};

/// An oracle that is also a classifier: exposes logits and a prediction.
class Classifier : public GradientOracle {
 public:
  [[nodiscard]] virtual Vec logits(std::span<const double> x) const = 0;
  [[nodiscard]] std::size_t predict(std::span<const double> x) const { return argmax(logits(x)); }
};

using OraclePtr = std::shared_ptr<const GradientOracle>;
using ClassifierPtr = std::shared_ptr<const Classifier>;

/// Central differences (L(x + h e_d) - L(x - h e_d)) / 2h for every coordinate.
inline Vec finite_diff_gradient(const GradientOracle& oracle, std::span<const double> x, std::size_t label,
                                double h) {
  require(h > 0.0, "finite_diff_gradient: step h must be positive");
  Vec probe(x.begin(), x.end());
  Vec out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double orig = probe[d];
    probe[d] = orig + h;
    const double up = oracle.loss(probe, label);
    probe[d] = orig - h;
    const double down = oracle.loss(probe, label);
    probe[d] = orig;
    out[d] = (up - down) / (2.0 * h);
  }
  return out;
}

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::size_t probes = 0;
};

/// Relative error of an analytic gradient against central differences:
/// ||g - fd||_inf / max(||g||_inf, ||fd||_inf, floor). The floor keeps
/// near-stationary probes from amplifying roundoff.
inline double gradient_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                                      double floor = 1e-8) {
  const double scale = std::max({norm_linf(analytic), norm_linf(numeric), floor});
  return norm_linf(subtract(analytic, numeric)) / scale;
}

/// Compares the oracle's gradient with central differences at `probes`
/// points drawn uniformly from `box` (labels drawn uniformly too).
inline GradientCheckReport check_gradient(const GradientOracle& oracle, std::size_t probes, double h,
                                          std::uint64_t seed, Box box = {}) {
  CounterRng rng(seed);
  GradientCheckReport report;
  report.probes = probes;
  Vec x(oracle.input_dim());
  for (std::size_t p = 0; p < probes; ++p) {
    rng.fill_uniform(x, box.lo, box.hi);
    const auto label = static_cast<std::size_t>(rng.next() % oracle.num_classes());
    const Vec analytic = oracle.gradient(x, label);
    const Vec numeric = finite_diff_gradient(oracle, x, label, h);
    report.max_relative_error = std::max(report.max_relative_error, gradient_relative_error(analytic, numeric));
  }
  return report;
}

/// Weighted average of member losses and gradients (ensemble surrogate).
class EnsembleOracle final : public GradientOracle {
 public:
  EnsembleOracle(std::vector<OraclePtr> members, Vec weights)
      : members_(std::move(members)), weights_(std::move(weights)) {
    require(!members_.empty(), "ensemble: at least one member required");
    require(members_.size() == weights_.size(), "ensemble: one weight per member required");
    double total = 0.0;
    for (double w : weights_) {
      require(w >= 0.0, "ensemble: weights must be nonnegative");
      total += w;
    }
    require(std::abs(total - 1.0) <= 1e-9, "ensemble: weights must sum to 1");
    for (const auto& m : members_) {
      require(m != nullptr, "ensemble: null member");
      require(m->input_dim() == members_.front()->input_dim(), "ensemble: members have heterogeneous input shapes");
      require(m->num_classes() == members_.front()->num_classes(), "ensemble: members have different class counts");
    }
  }

  [[nodiscard]] std::size_t input_dim() const override { return members_.front()->input_dim(); }
  [[nodiscard]] std::size_t num_classes() const override { return members_.front()->num_classes(); }

  [[nodiscard]] double loss(std::span<const double> x, std::size_t label) const override {
    check_input(x, label);
    double total = 0.0;
    for (std::size_t k = 0; k < members_.size(); ++k) total += weights_[k] * members_[k]->loss(x, label);
    return total;
  }

  [[nodiscard]] LossGrad loss_and_gradient(std::span<const double> x, std::size_t label) const override {
    check_input(x, label);
    LossGrad out{0.0, Vec(x.size(), 0.0)};
    for (std::size_t k = 0; k < members_.size(); ++k) {
      const LossGrad member = members_[k]->loss_and_gradient(x, label);
      out.loss += weights_[k] * member.loss;
      axpy(weights_[k], member.gradient, out.gradient);
    }
    return out;
  }

 private:
  std::vector<OraclePtr> members_;
  Vec weights_;
};

inline OraclePtr ensemble_oracle(std::vector<OraclePtr> members, Vec weights) {
  return std::make_shared<EnsembleOracle>(std::move(members), std::move(weights));
}

}  // namespace ggs

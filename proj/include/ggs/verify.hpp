#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "ggs/attack.hpp"
#include "ggs/landscape.hpp"
#include "ggs/mlp.hpp"
#include "ggs/oracle.hpp"
#include "ggs/parallel.hpp"
#include "ggs/softmax.hpp"
#include "ggs/train.hpp"

namespace ggs {

/// c * L(x) for a wrapped oracle.
class ScaledOracle final : public Classifier {
 public:
  ScaledOracle(std::shared_ptr<const Classifier> inner, double scale) : inner_(std::move(inner)), scale_(scale) {}
  [[nodiscard]] std::size_t input_dim() const override { return inner_->input_dim(); }
  [[nodiscard]] std::size_t num_classes() const override { return inner_->num_classes(); }
  [[nodiscard]] Vec logits(std::span<const double> x) const override { return inner_->logits(x); }
  [[nodiscard]] double loss(std::span<const double> x, std::size_t label) const override {
    return scale_ * inner_->loss(x, label);
  }
  [[nodiscard]] LossGrad loss_and_gradient(std::span<const double> x, std::size_t label) const override {
    LossGrad lg = inner_->loss_and_gradient(x, label);
    lg.loss *= scale_;
    for (double& g : lg.gradient) g *= scale_;
    return lg;
  }

 private:
  std::shared_ptr<const Classifier> inner_;
  double scale_;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<PropertyResult> results;
  [[nodiscard]] bool all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.passed; });
  }
};

namespace verify_detail {

inline LinearLayer random_layer(std::size_t in, std::size_t out, std::uint64_t seed, double scale = 1.0) {
  CounterRng rng(seed);
  LinearLayer layer{in, out, Vec(in * out), Vec(out)};
  rng.fill_uniform(layer.weights, -scale, scale);
  rng.fill_uniform(layer.bias, -scale, scale);
  return layer;
}

inline ToyModel random_mlp(std::vector<std::size_t> widths, Activation act, std::uint64_t seed) {
  ToyModel m = initialize_model(std::move(widths), act, seed);
  CounterRng rng(seed, 3);
  for (double& p : m.parameters) p += rng.uniform(-0.3, 0.3);
  return m;
}

inline SyntheticLandscape random_landscape(std::size_t dim, Composition comp, std::uint64_t seed) {
  CounterRng rng(seed);
  Vec a(dim), b(dim);
  rng.fill_uniform(a, 0.2, 0.8);
  rng.fill_uniform(b, 0.2, 0.8);
  return SyntheticLandscape({{a, 1.2, 0.15, PeakKind::Sharp}, {b, 1.0, 0.4, PeakKind::Flat}}, comp, 0.1);
}

/// Linear softmax whose first input coordinate has no influence (zero
/// gradient there everywhere).
inline std::shared_ptr<const Classifier> dead_coordinate_oracle(std::size_t dim, std::uint64_t seed) {
  LinearLayer layer = random_layer(dim, 3, seed, 2.0);
  for (std::size_t k = 0; k < layer.out; ++k) layer.weights[k * dim] = 0.0;
  return std::make_shared<LinearSoftmaxOracle>(std::move(layer));
}

/// Momentum iterative FGSM written out independently of the attack module.
inline std::vector<Vec> reference_mi_trajectory(const GradientOracle& oracle, const Vec& x, std::size_t label,
                                                double eps, double alpha, int steps, double gamma) {
  auto sgn = [](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); };
  std::vector<Vec> out;
  Vec cur = x;
  Vec v(x.size(), 0.0);
  for (int t = 0; t < steps; ++t) {
    const Vec g = oracle.gradient(cur, label);
    double l1 = 0.0;
    for (double e : g) l1 += std::abs(e);
    for (std::size_t d = 0; d < v.size(); ++d) v[d] = gamma * v[d] + (l1 > 0.0 ? g[d] / l1 : 0.0);
    for (std::size_t d = 0; d < cur.size(); ++d) {
      double next = cur[d] + alpha * sgn(v[d]);
      next = std::min(std::max(next, x[d] - eps), x[d] + eps);
      cur[d] = std::min(std::max(next, 0.0), 1.0);
    }
    out.push_back(cur);
  }
  return out;
}

inline std::vector<std::shared_ptr<const GradientOracle>> attack_oracles(std::size_t dim, std::uint64_t seed) {
  std::vector<std::shared_ptr<const GradientOracle>> out;
  out.push_back(std::make_shared<SyntheticLandscape>(random_landscape(dim, Composition::Sum, seed)));
  out.push_back(std::make_shared<LinearSoftmaxOracle>(random_layer(dim, 3, seed + 1, 2.0)));
  out.push_back(std::make_shared<MlpOracle>(random_mlp({dim, 6, 3}, Activation::Tanh, seed + 2)));
  out.push_back(dead_coordinate_oracle(dim, seed + 3));
  return out;
}

inline std::string fmt(double v) { return format_double(v); }

using Property = std::function<PropertyResult()>;

inline PropertyResult gradient_property(const std::string& name, const GradientOracle& oracle, double tol,
                                        std::uint64_t seed) {
  const auto rep = check_gradient(oracle, 20, 1e-5, seed);
  return {name, rep.max_relative_error <= tol,
          "max relative error " + fmt(rep.max_relative_error) + " (limit " + fmt(tol) + ", 20 probes)"};
}

inline std::vector<Property> properties() {
  std::vector<Property> ps;
  ps.emplace_back([] {
    const auto a = random_landscape(4, Composition::Sum, 101);
    const auto b = random_landscape(4, Composition::SmoothMax, 102);
    auto ra = gradient_property("gradient_fidelity_landscape", a, 1e-6, 1);
    const auto rb = gradient_property("gradient_fidelity_landscape", b, 1e-6, 2);
    ra.passed = ra.passed && rb.passed;
    ra.detail = "sum: " + ra.detail + "; smooth max: " + rb.detail;
    return ra;
  });
  ps.emplace_back([] {
    return gradient_property("gradient_fidelity_linear_softmax", LinearSoftmaxOracle(random_layer(6, 4, 7, 2.0)), 1e-6, 3);
  });
  ps.emplace_back([] {
    const MlpOracle tanh(random_mlp({6, 10, 8, 3}, Activation::Tanh, 11));
    const MlpOracle softplus(random_mlp({6, 10, 3}, Activation::Softplus, 12));
    auto r = gradient_property("gradient_fidelity_mlp", tanh, 1e-5, 4);
    const auto s = gradient_property("gradient_fidelity_mlp", softplus, 1e-5, 5);
    r.passed = r.passed && s.passed;
    r.detail = "tanh: " + r.detail + "; softplus: " + s.detail;
    return r;
  });
  ps.emplace_back([] {
    const auto m1 = std::make_shared<MlpOracle>(random_mlp({5, 8, 3}, Activation::Tanh, 21));
    const auto m2 = std::make_shared<LinearSoftmaxOracle>(random_layer(5, 3, 22, 2.0));
    const EnsembleOracle ens({m1, m2}, {0.3, 0.7});
    return gradient_property("gradient_fidelity_ensemble", ens, 1e-5, 6);
  });
  ps.emplace_back([] {
    CounterRng rng(31);
    double worst = 0.0;
    Vec logits(7);
    for (int k = 0; k < 200; ++k) {
      rng.fill_uniform(logits, -50.0, 50.0);
      const Vec p = softmax(logits);
      double s = 0.0;
      for (double e : p) s += e;
      worst = std::max(worst, std::abs(s - 1.0));
    }
    return PropertyResult{"softmax_normalization", worst <= 1e-12, "max |sum - 1| " + fmt(worst) + " over 200 draws"};
  });
  ps.emplace_back([] {
    CounterRng rng(41);
    std::size_t bad = 0;
    for (int k = 0; k < 500; ++k) {
      const std::size_t dim = 1 + rng.next() % 12;
      Vec x(dim), prev(dim), v(dim);
      rng.fill_uniform(x, 0.0, 1.0);
      const double eps = rng.uniform(0.0, 0.3);
      for (std::size_t d = 0; d < dim; ++d) prev[d] = std::clamp(x[d] + rng.uniform(-eps, eps), 0.0, 1.0);
      rng.fill_uniform(v, -1.0, 1.0);
      const double alpha = rng.uniform(0.0, eps);
      const InputPoint out = project_step(InputPoint(prev), v, alpha, InputPoint(x), eps, Box{});
      for (std::size_t d = 0; d < dim; ++d) {
        const bool in_ball = std::abs(out[d] - x[d]) <= eps * (1.0 + 1e-15) + 1e-16;
        if (!in_ball || out[d] < 0.0 || out[d] > 1.0) ++bad;
      }
    }
    return PropertyResult{"projection_ball_box", bad == 0, std::to_string(bad) + " coordinates outside ball or box"};
  });
  ps.emplace_back([] {
    std::size_t bad = 0;
    std::size_t runs = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 16; ++s) {
      CounterRng rng(51, s);
      const auto oracles = attack_oracles(6, 500 + s);
      Vec x(6);
      rng.fill_uniform(x, 0.0, 1.0);
      for (Sampler sampler : kAllSamplers) {
        AttackConfig c;
        c.epsilon = rng.uniform(0.0, 0.2);
        c.outer_iters = 3;
        c.inner_iters = 4;
        c.sample_radius = 2.0 * c.epsilon;
        c.sampler = sampler;
        c.rng_seed = rng.next();
        const auto r = run_attack(*oracles[s % oracles.size()], InputPoint(x), 0, c);
        const double ulp_slack = 4.0 * std::numeric_limits<double>::epsilon();
        ++runs;
        const double excess = r.perturbation_linf - c.epsilon;
        worst = std::max(worst, excess);
        bool ok = excess <= ulp_slack;
        for (double e : r.adversarial.values()) ok = ok && e >= 0.0 && e <= 1.0;
        bad += ok ? 0 : 1;
      }
    }
    return PropertyResult{"budget_invariant", bad == 0,
                          std::to_string(bad) + "/" + std::to_string(runs) + " runs violate the budget (worst excess " + fmt(worst) + ")"};
  });
  ps.emplace_back([] {
    std::size_t mismatches = 0;
    std::size_t runs = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 6; ++s) {
      CounterRng rng(61, s);
      const auto oracles = attack_oracles(5, 700 + s);
      for (const auto& oracle : oracles) {
        Vec x(5);
        rng.fill_uniform(x, 0.0, 1.0);
        const std::size_t label = oracle->num_classes() == 1 ? 0 : rng.next() % oracle->num_classes();
        AttackConfig c;
        c.epsilon = 0.1;
        c.outer_iters = 6;
        c.inner_iters = 5;
        c.sample_radius = 0.0;
        const auto ref = reference_mi_trajectory(*oracle, x, label, c.epsilon, c.alpha(), c.outer_iters, c.momentum_decay);
        for (Sampler sampler : {Sampler::Rs, Sampler::Mgs, Sampler::Ggs}) {
          c.sampler = sampler;
          c.rng_seed = rng.next();
          const auto r = run_attack(*oracle, InputPoint(x), label, c);
          ++runs;
          double diff = 0.0;
          for (std::size_t t = 0; t < ref.size(); ++t) diff = std::max(diff, norm_linf(subtract(ref[t], r.trace.iterates[t])));
          worst = std::max(worst, diff);
          mismatches += diff <= 1e-12 ? 0 : 1;
        }
      }
    }
    return PropertyResult{"degeneration_zeta_zero", mismatches == 0,
                          std::to_string(mismatches) + "/" + std::to_string(runs) +
                              " zeta=0 trajectories differ from the momentum reference (max diff " + fmt(worst) + ")"};
  });
  ps.emplace_back([] {
    std::size_t mismatches = 0;
    std::size_t runs = 0;
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto base = std::make_shared<MlpOracle>(random_mlp({6, 8, 3}, Activation::Tanh, 800 + s));
      const ScaledOracle big(base, 1000.0);
      const ScaledOracle small(base, 1e-3);
      CounterRng rng(71, s);
      Vec x(6);
      rng.fill_uniform(x, 0.0, 1.0);
      for (Sampler sampler : kAllSamplers) {
        AttackConfig c;
        c.epsilon = 0.1;
        c.outer_iters = 4;
        c.inner_iters = 4;
        c.sample_radius = 0.2;
        c.sampler = sampler;
        c.rng_seed = rng.next();
        const auto r0 = run_attack(*base, InputPoint(x), 1, c);
        const auto r1 = run_attack(big, InputPoint(x), 1, c);
        const auto r2 = run_attack(small, InputPoint(x), 1, c);
        ++runs;
        if (r0.adversarial.values() != r1.adversarial.values() || r0.adversarial.values() != r2.adversarial.values())
          ++mismatches;
      }
    }
    return PropertyResult{"loss_scale_invariance", mismatches == 0,
                          std::to_string(mismatches) + "/" + std::to_string(runs) + " runs change under loss scaling"};
  });
  ps.emplace_back([] {
    std::size_t mismatches = 0;
    const auto oracles = attack_oracles(5, 900);
    for (Sampler sampler : kAllSamplers) {
      AttackConfig c;
      c.sampler = sampler;
      c.rng_seed = 12345;
      c.outer_iters = 4;
      c.inner_iters = 6;
      const Vec x{0.2, 0.4, 0.6, 0.8, 0.5};
      for (const auto& o : oracles) {
        const auto a = run_attack(*o, InputPoint(x), 0, c);
        const auto b = run_attack(*o, InputPoint(x), 0, c);
        if (a.trace.iterates != b.trace.iterates) ++mismatches;
      }
    }
    return PropertyResult{"attack_determinism", mismatches == 0, std::to_string(mismatches) + " repeated runs differ"};
  });
  ps.emplace_back([] {
    const ToyModel m = random_mlp({4, 7, 3}, Activation::Softplus, 1001);
    const ToyModel back = decode_model(encode_model(m));
    const MlpOracle a(m), b(back);
    CounterRng rng(91);
    std::size_t differ = 0;
    Vec x(4);
    for (int k = 0; k < 20; ++k) {
      rng.fill_uniform(x, 0.0, 1.0);
      if (a.loss(x, k % 3) != b.loss(x, k % 3)) ++differ;
    }
    return PropertyResult{"model_roundtrip", differ == 0, std::to_string(differ) + "/20 losses differ after reload"};
  });
  return ps;
}

}  // namespace verify_detail

/// Fast invariant battery. Verdicts do not depend on `jobs`.
inline VerifyReport run_verify(std::size_t jobs = 1) {
  const auto props = verify_detail::properties();
  VerifyReport report;
  report.results.resize(props.size());
  parallel_for(props.size(), jobs, [&](std::size_t i) {
    try {
      report.results[i] = props[i]();
    } catch (const std::exception& e) {
      report.results[i] = {"property_" + std::to_string(i), false, std::string("threw: ") + e.what()};
    }
  });
  return report;
}

inline void print_verify(std::ostream& out, const VerifyReport& report) {
  for (const PropertyResult& r : report.results)
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
  std::size_t failed = 0;
  for (const PropertyResult& r : report.results) failed += r.passed ? 0 : 1;
  if (failed == 0) {
    out << "all " << report.results.size() << " properties passed\n";
  } else {
    out << failed << " of " << report.results.size() << " properties failed:";
    for (const PropertyResult& r : report.results)
      if (!r.passed) out << " " << r.name;
    out << "\n";
  }
}

}  // namespace ggs

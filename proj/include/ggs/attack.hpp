#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ggs/config.hpp"
#include "ggs/core.hpp"
#include "ggs/diagnostics.hpp"
#include "ggs/oracle.hpp"
#include "ggs/rng.hpp"
#include "ggs/transform.hpp"

// Momentum iterative attacks with inner-iteration sampling.
//
// Outer loop (t = 1..T):
//   direction_t = sum_i g_i / ||sum_i g_i||_1        (inner loop, or one gradient)
//   v_t         = gamma v_{t-1} + direction_t
//   x_t         = clip_box(clip_ball(x_{t-1} + alpha sign(v_t)))
//
// Inner sampling points (i = 1..N), p ~ U(-zeta, zeta) per coordinate:
//   RS   x + p
//   MGS  x + |p| sign(m_{i-1}),   m_{i-1} = g_1 + ... + g_{i-1}  (g_0 when i = 1)
//   GGS  x + |p| sign(g_{i-1})
// Sampling points are never clipped; only the outer update projects.
//
// Random stream order for one attack (CounterRng(rng_seed), stream 0):
//   1. g_0: one draw per coordinate, coordinate-major.
//   2. for t = 1..T: [fresh g_0 if redraw_init_per_outer and t > 1]
//                    then for i = 1..N (inner-loop samplers only): p.
// Every sampler draws g_0, so streams stay aligned across samplers. Input
// transforms draw from the independent child stream split(1).

namespace ggs {

/// Gradient of the attack objective (already sign-adjusted for targeted attacks).
using GradientFn = std::function<Vec(std::span<const double>)>;

inline Vec draw_noise(std::size_t dim, double zeta, CounterRng& rng) {
  Vec p(dim);
  rng.fill_uniform(p, -zeta, zeta);
  return p;
}

/// x + |noise| * sign(guidance)
inline Vec guided_point(std::span<const double> x, std::span<const double> noise, std::span<const double> guidance) {
  require(x.size() == guidance.size(), "sampling guidance shape does not match the input");
  require(x.size() == noise.size(), "sampling noise shape does not match the input");
  Vec out(x.begin(), x.end());
  for (std::size_t d = 0; d < out.size(); ++d) out[d] += std::abs(noise[d]) * sign(guidance[d]);
  return out;
}

inline InputPoint sample_rs(const InputPoint& x_adv, double zeta, CounterRng& rng) {
  require(zeta >= 0.0, "sample_rs: zeta must be >= 0");
  return x_adv.with_values(add(x_adv.view(), draw_noise(x_adv.size(), zeta, rng)));
}

inline InputPoint sample_mgs(const InputPoint& x_adv, double zeta, std::span<const double> m_prev, CounterRng& rng) {
  require(zeta >= 0.0, "sample_mgs: zeta must be >= 0");
  require(m_prev.size() == x_adv.size(), "sample_mgs: momentum shape does not match the input");
  return x_adv.with_values(guided_point(x_adv.view(), draw_noise(x_adv.size(), zeta, rng), m_prev));
}

inline InputPoint sample_ggs(const InputPoint& x_adv, double zeta, std::span<const double> g_prev, CounterRng& rng) {
  require(zeta >= 0.0, "sample_ggs: zeta must be >= 0");
  require(g_prev.size() == x_adv.size(), "sample_ggs: gradient shape does not match the input");
  return x_adv.with_values(guided_point(x_adv.view(), draw_noise(x_adv.size(), zeta, rng), g_prev));
}

/// x + alpha * gamma * v
inline InputPoint ni_lookahead_point(const InputPoint& x_adv, std::span<const double> v_prev, double alpha,
                                     double gamma) {
  require(v_prev.size() == x_adv.size(), "ni_lookahead_point: momentum shape does not match the input");
  Vec out = x_adv.values();
  axpy(alpha * gamma, v_prev, out);
  return x_adv.with_values(std::move(out));
}

/// Guidance vector whose sign steers inner step i, given g_0 and the
/// gradients g_1..g_{i-1} gathered so far. Empty for RS.
inline Vec sampling_guidance(Sampler sampler, std::span<const double> g0, const std::vector<Vec>& previous) {
  switch (sampler) {
    case Sampler::Mgs: {
      if (previous.empty()) return Vec(g0.begin(), g0.end());
      Vec m(previous.front().size(), 0.0);
      for (const Vec& g : previous) axpy(1.0, g, m);
      return m;
    }
    case Sampler::Ggs:
      return previous.empty() ? Vec(g0.begin(), g0.end()) : previous.back();
    default:
      return {};
  }
}

/// Sampling point of inner step i rebuilt from its noise draw and the
/// gradients that precede it. Used to replay traces.
inline Vec replay_sampling_point(Sampler sampler, std::span<const double> x_adv, std::span<const double> noise,
                                 std::span<const double> g0, const std::vector<Vec>& previous) {
  require(uses_inner_loop(sampler), "replay_sampling_point: sampler has no inner loop");
  if (sampler == Sampler::Rs) return add(x_adv, noise);
  return guided_point(x_adv, noise, sampling_guidance(sampler, g0, previous));
}

struct InnerResult {
  Vec summed;              // sum_i g_i
  Vec avg_direction;       // summed / ||summed||_1, zero when degenerate
  bool degenerate = false; // summed == 0
  std::vector<Vec> gradients;
  std::vector<Vec> points;
  std::vector<Vec> noises;
  std::size_t zero_sign_guidance = 0;
};

inline InnerResult inner_loop(const GradientFn& gradient, const InputPoint& x_adv, const AttackConfig& config,
                              std::span<const double> g0, CounterRng& rng, bool keep_gradients = true) {
  require(uses_inner_loop(config.sampler), "inner_loop: sampler must be rs, mgs or ggs");
  require(config.inner_iters >= 1, "inner_loop: inner_iters must be >= 1");
  require(g0.size() == x_adv.size(), "inner_loop: g_0 shape does not match the input");
  const std::size_t dim = x_adv.size();
  const double zeta = config.sample_radius;

  InnerResult result;
  result.summed.assign(dim, 0.0);
  Vec guidance(g0.begin(), g0.end());  // sign source for MGS/GGS: m_{i-1} or g_{i-1}
  for (int i = 1; i <= config.inner_iters; ++i) {
    Vec noise = draw_noise(dim, zeta, rng);
    Vec point;
    if (config.sampler == Sampler::Rs) {
      point = add(x_adv.view(), noise);
    } else {
      for (double e : guidance) result.zero_sign_guidance += e == 0.0 ? 1 : 0;
      point = guided_point(x_adv.view(), noise, guidance);
    }
    Vec g = gradient(point);
    if (!all_finite(g)) throw OracleError("non-finite gradient at inner step " + std::to_string(i));
    axpy(1.0, g, result.summed);
    if (config.sampler == Sampler::Mgs) guidance = result.summed;
    if (config.sampler == Sampler::Ggs) guidance = g;
    if (config.log_sampling_points) {
      result.points.push_back(std::move(point));
      result.noises.push_back(std::move(noise));
    }
    if (keep_gradients) result.gradients.push_back(std::move(g));
  }
  const double l1 = norm_l1(result.summed);
  result.degenerate = l1 == 0.0;
  result.avg_direction = result.degenerate ? Vec(dim, 0.0) : scaled(result.summed, 1.0 / l1);
  return result;
}

/// Convenience overload: untargeted/targeted gradient of `oracle` at `label`,
/// no input transform.
inline InnerResult inner_loop(const GradientOracle& oracle, const InputPoint& x_adv, std::size_t label,
                              const AttackConfig& config, std::span<const double> g0, CounterRng& rng) {
  const double direction = config.targeted ? -1.0 : 1.0;
  GradientFn fn = [&](std::span<const double> p) { return scaled(oracle.gradient(p, label), direction); };
  return inner_loop(fn, x_adv, config, g0, rng);
}

struct MomentumUpdate {
  Vec v;
  bool degenerate = false;
};

/// v = gamma v_prev + summed / ||summed||_1; a zero sum leaves v = gamma v_prev.
inline MomentumUpdate momentum_update(std::span<const double> v_prev, std::span<const double> summed_grad,
                                      double gamma) {
  require(v_prev.size() == summed_grad.size(), "momentum_update: shape mismatch");
  MomentumUpdate out{scaled(v_prev, gamma), false};
  const double l1 = norm_l1(summed_grad);
  if (l1 == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t d = 0; d < out.v.size(); ++d) out.v[d] += summed_grad[d] / l1;
  return out;
}

/// clip_box(clip_ball(x_prev + alpha sign(v), x_orig, eps))
inline InputPoint project_step(const InputPoint& x_prev, std::span<const double> v, double alpha,
                               const InputPoint& x_orig, double epsilon, Box box) {
  require(x_prev.size() == v.size() && x_prev.size() == x_orig.size(), "project_step: shape mismatch");
  require(epsilon >= 0.0, "project_step: epsilon must be >= 0");
  Vec out(x_prev.size());
  for (std::size_t d = 0; d < out.size(); ++d) {
    const double stepped = x_prev[d] + alpha * sign(v[d]);
    const double in_ball = std::clamp(stepped, x_orig[d] - epsilon, x_orig[d] + epsilon);
    out[d] = box.clip(in_ball);
  }
  return x_prev.with_values(std::move(out));
}

struct OuterRecord {
  double loss = 0.0;  // oracle loss at x_t for the attack label
  double momentum_l1 = 0.0;
  bool degenerate_inner_sum = false;
  std::size_t zero_sign_steps = 0;     // coordinates with sign(v_t) = 0
  std::size_t zero_sign_guidance = 0;  // inner guidance coordinates with sign 0
  Vec initial_guidance;                // g_0 used by this outer iteration (when points are logged)
  std::vector<Vec> inner_gradients;
  std::vector<Vec> sampling_points;
  std::vector<Vec> sampling_noise;
  CosineProfile cosine;  // filled when at least two inner gradients are logged
};

struct AttackTrace {
  std::vector<OuterRecord> outer;
  std::vector<Vec> iterates;  // x_1 .. x_T
};

struct AttackResult {
  InputPoint adversarial;
  AttackTrace trace;
  double final_loss = 0.0;
  double perturbation_linf = 0.0;
  double perturbation_l2 = 0.0;
};

/// Oracle failure during an attack; carries the trace up to the failure.
class AttackAborted : public std::runtime_error {
 public:
  AttackAborted(const std::string& message, AttackTrace partial)
      : std::runtime_error(message), partial_(std::move(partial)) {}
  [[nodiscard]] const AttackTrace& partial_trace() const { return partial_; }

 private:
  AttackTrace partial_;
};

inline AttackResult run_attack(const GradientOracle& oracle, const InputPoint& x, std::size_t label,
                               const AttackConfig& config) {
  config.validate();
  require(x.size() == oracle.input_dim(), "run_attack: input dimension does not match the oracle");
  const std::size_t attack_label = config.targeted ? *config.target_label : label;
  require(attack_label < oracle.num_classes(), "run_attack: label out of range");

  const std::size_t dim = x.size();
  const double alpha = config.alpha();
  const double gamma = config.momentum_decay;
  const double zeta = config.sample_radius;
  const double direction = config.targeted ? -1.0 : 1.0;

  CounterRng rng(config.rng_seed);
  CounterRng transform_rng = rng.split(1);
  const GradientFn gradient = [&](std::span<const double> point) {
    if (config.transform.kind == TransformKind::Identity) return scaled(oracle.gradient(point, attack_label), direction);
    const AppliedTransform t = apply_transform(config.transform, point, x.shape(), transform_rng);
    return scaled(t.pullback(oracle.gradient(t.values, attack_label)), direction);
  };

  AttackTrace trace;
  Vec g0 = draw_noise(dim, zeta, rng);
  Vec v(dim, 0.0);
  InputPoint current = x;

  try {
    for (int t = 1; t <= config.outer_iters; ++t) {
      if (config.redraw_init_per_outer && t > 1) g0 = draw_noise(dim, zeta, rng);
      OuterRecord record;
      Vec summed;
      if (uses_inner_loop(config.sampler)) {
        InnerResult inner = inner_loop(gradient, current, config, g0, rng, config.log_inner_gradients);
        summed = std::move(inner.summed);
        record.zero_sign_guidance = inner.zero_sign_guidance;
        record.inner_gradients = std::move(inner.gradients);
        record.sampling_points = std::move(inner.points);
        record.sampling_noise = std::move(inner.noises);
        if (config.log_sampling_points) record.initial_guidance = g0;
      } else {
        const InputPoint at = config.sampler == Sampler::NiLookahead ? ni_lookahead_point(current, v, alpha, gamma)
                                                                     : current;
        summed = gradient(at.view());
        if (!all_finite(summed)) throw OracleError("non-finite gradient at outer step " + std::to_string(t));
        if (config.log_inner_gradients) record.inner_gradients.push_back(summed);
      }

      MomentumUpdate update = momentum_update(v, summed, gamma);
      v = std::move(update.v);
      record.degenerate_inner_sum = update.degenerate;
      record.momentum_l1 = norm_l1(v);
      for (double e : v) record.zero_sign_steps += e == 0.0 ? 1 : 0;

      current = project_step(current, v, alpha, x, config.epsilon, config.box);
      record.loss = oracle.loss(current.view(), attack_label);
      if (!std::isfinite(record.loss)) throw OracleError("non-finite loss at outer step " + std::to_string(t));
      if (record.inner_gradients.size() >= 2) record.cosine = inner_cosine_profile(record.inner_gradients);

      trace.iterates.push_back(current.values());
      trace.outer.push_back(std::move(record));
    }
  } catch (const std::exception& e) {
    throw AttackAborted(std::string("attack aborted: ") + e.what(), std::move(trace));
  }

  AttackResult result;
  const Vec delta = subtract(current.view(), x.view());
  result.final_loss = trace.outer.back().loss;
  result.perturbation_linf = norm_linf(delta);
  result.perturbation_l2 = norm_l2(delta);
  result.adversarial = std::move(current);
  result.trace = std::move(trace);
  return result;
}

/// Mean cosine profile over the outer iterations of a trace (entries with a
/// degenerate profile are skipped). Empty when no profiles were recorded.
inline Vec mean_cosine_profile(const AttackTrace& trace) {
  Vec mean;
  std::size_t count = 0;
  for (const OuterRecord& r : trace.outer) {
    if (r.cosine.values.empty() || r.cosine.degenerate) continue;
    if (mean.empty()) mean.assign(r.cosine.values.size(), 0.0);
    axpy(1.0, r.cosine.values, mean);
    ++count;
  }
  for (double& e : mean) e /= static_cast<double>(count);
  return mean;
}

}  // namespace ggs

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "ggs/core.hpp"

namespace ggs {

/// Inner-iteration strategy of an attack.
///   NoneMi      one gradient at the current iterate (MI-FGSM)
///   NiLookahead one gradient at x + alpha*gamma*v (NI-FGSM)
///   Rs          N gradients at x + p, p ~ U(-zeta, zeta)
///   Mgs         N gradients at x + |p| sign(m_{i-1}), m = running gradient sum
///   Ggs         N gradients at x + |p| sign(g_{i-1}), previous inner gradient
enum class Sampler { NoneMi, NiLookahead, Rs, Mgs, Ggs };

inline constexpr std::array<Sampler, 5> kAllSamplers{Sampler::NoneMi, Sampler::NiLookahead, Sampler::Rs, Sampler::Mgs,
                                                     Sampler::Ggs};

inline const char* to_string(Sampler s) {
  switch (s) {
    case Sampler::NoneMi:
      return "mi";
    case Sampler::NiLookahead:
      return "ni";
    case Sampler::Rs:
      return "rs";
    case Sampler::Mgs:
      return "mgs";
    case Sampler::Ggs:
      return "ggs";
  }
  return "?";
}

inline std::optional<Sampler> parse_sampler(std::string_view name) {
  for (Sampler s : kAllSamplers)
    if (name == to_string(s)) return s;
  if (name == "none_mi" || name == "mi-fgsm") return Sampler::NoneMi;
  if (name == "ni_lookahead" || name == "ni-fgsm") return Sampler::NiLookahead;
  return std::nullopt;
}

inline bool uses_inner_loop(Sampler s) { return s == Sampler::Rs || s == Sampler::Mgs || s == Sampler::Ggs; }

enum class TransformKind { Identity, ResizePad };

/// Optional input transform applied to each gradient-evaluation point.
struct TransformSpec {
  TransformKind kind = TransformKind::Identity;
  double min_scale = 0.8;  // ResizePad: smallest resized extent as a fraction of the original

  bool operator==(const TransformSpec&) const = default;
};

inline constexpr double kDefaultEpsilon = 16.0 / 255.0;

struct AttackConfig {
  double epsilon = kDefaultEpsilon;
  int outer_iters = 10;
  std::optional<double> step_size;  // defaults to epsilon / outer_iters
  int inner_iters = 20;
  double sample_radius = 2.0 * kDefaultEpsilon;
  double momentum_decay = 1.0;
  Sampler sampler = Sampler::Ggs;
  bool targeted = false;
  std::optional<std::size_t> target_label;
  std::uint64_t rng_seed = 0;

  /// Redraw the initial guidance g_0 at the start of every outer iteration
  /// instead of once per attack.
  bool redraw_init_per_outer = false;
  Box box{};
  TransformSpec transform{};
  /// Keep every inner gradient in the trace (needed for cosine profiles).
  bool log_inner_gradients = true;
  /// Also keep the inner sampling points and their noise draws (replay tests).
  bool log_sampling_points = false;

  [[nodiscard]] double alpha() const { return step_size.value_or(epsilon / outer_iters); }

  void validate() const {
    require(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon must be finite and >= 0");
    require(outer_iters >= 1, "outer_iters must be a positive integer");
    require(inner_iters >= 1, "inner_iters must be a positive integer");
    require(std::isfinite(alpha()) && alpha() >= 0.0, "step_size must be finite and >= 0");
    std::ostringstream msg;
    msg.precision(17);
    msg << "step_size (" << alpha() << ") exceeds epsilon (" << epsilon << "): invariant alpha <= epsilon violated";
    require(alpha() <= epsilon, msg.str());
    require(std::isfinite(sample_radius) && sample_radius >= 0.0, "sample_radius must be finite and >= 0");
    require(std::isfinite(momentum_decay) && momentum_decay >= 0.0, "momentum_decay must be finite and >= 0");
    require(box.lo < box.hi, "box lower bound must be below upper bound");
    require(!targeted || target_label.has_value(), "targeted attack requires target_label");
    require(transform.min_scale > 0.0 && transform.min_scale <= 1.0, "transform.min_scale must be in (0, 1]");
  }

  /// Reference hyperparameters: eps = 16/255, T = 10,
  /// alpha = eps/T, N = 20, zeta = 2 eps, gamma = 1, GGS sampling.
  [[nodiscard]] static AttackConfig defaults() { return AttackConfig{}; }
};

}  // namespace ggs

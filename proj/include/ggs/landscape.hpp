#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ggs/core.hpp"
#include "ggs/oracle.hpp"
#include "ggs/rng.hpp"

namespace ggs {

enum class PeakKind { Sharp, Flat };

struct Peak {
  Vec center;
  double height = 1.0;
  double width = 1.0;
  PeakKind kind = PeakKind::Flat;
};

enum class Composition { Sum, SmoothMax };

/// Sum (or smooth maximum) of Gaussian bumps
///   b_j(x) = h_j exp(-||x - c_j||^2 / (2 w_j^2)).
/// The label argument is ignored; the landscape reports one class.
class SyntheticLandscape final : public GradientOracle {
 public:
  SyntheticLandscape(std::vector<Peak> peaks, Composition composition = Composition::Sum,
                     double temperature = 0.05)
      : peaks_(std::move(peaks)), composition_(composition), temperature_(temperature) {
    require(!peaks_.empty(), "landscape: at least one peak required");
    for (const Peak& p : peaks_) {
      require(p.center.size() == peaks_.front().center.size(), "landscape: peak centers differ in dimension");
      require(p.height > 0.0, "landscape: peak height must be positive");
      require(p.width > 0.0, "landscape: peak width must be positive");
    }
    require(temperature_ > 0.0, "landscape: smooth-max temperature must be positive");
  }

  [[nodiscard]] std::size_t input_dim() const override { return peaks_.front().center.size(); }
  [[nodiscard]] std::size_t num_classes() const override { return 1; }
  [[nodiscard]] const std::vector<Peak>& peaks() const { return peaks_; }
  [[nodiscard]] Composition composition() const { return composition_; }

  [[nodiscard]] double loss(std::span<const double> x, std::size_t label) const override {
    return loss_and_gradient(x, label).loss;
  }

  [[nodiscard]] LossGrad loss_and_gradient(std::span<const double> x, std::size_t label) const override {
    check_input(x, label);
    const std::size_t dim = x.size();
    Vec bumps(peaks_.size());
    std::vector<Vec> bump_grads(peaks_.size(), Vec(dim));
    for (std::size_t j = 0; j < peaks_.size(); ++j) {
      const Peak& p = peaks_[j];
      double sq = 0.0;
      for (std::size_t d = 0; d < dim; ++d) sq += (x[d] - p.center[d]) * (x[d] - p.center[d]);
      const double w2 = p.width * p.width;
      bumps[j] = p.height * std::exp(-sq / (2.0 * w2));
      for (std::size_t d = 0; d < dim; ++d) bump_grads[j][d] = -(x[d] - p.center[d]) / w2 * bumps[j];
    }

    LossGrad out{0.0, Vec(dim, 0.0)};
    if (composition_ == Composition::Sum) {
      for (std::size_t j = 0; j < peaks_.size(); ++j) {
        out.loss += bumps[j];
        axpy(1.0, bump_grads[j], out.gradient);
      }
      return out;
    }
    // tau * log sum exp(b_j / tau), shifted by the largest bump.
    const double top = *std::max_element(bumps.begin(), bumps.end());
    Vec weights(bumps.size());
    double z = 0.0;
    for (std::size_t j = 0; j < bumps.size(); ++j) {
      weights[j] = std::exp((bumps[j] - top) / temperature_);
      z += weights[j];
    }
    out.loss = top + temperature_ * std::log(z);
    for (std::size_t j = 0; j < bumps.size(); ++j) axpy(weights[j] / z, bump_grads[j], out.gradient);
    return out;
  }

  /// Closed-form maximizer for a single-peak landscape: (center, height).
  [[nodiscard]] std::optional<std::pair<Vec, double>> single_peak_maximum() const {
    if (peaks_.size() != 1) return std::nullopt;
    // Both compositions reduce to the bump itself when there is one peak.
    return std::make_pair(peaks_.front().center, peaks_.front().height);
  }

  /// Index of the peak whose center is nearest to x (basin identity).
  [[nodiscard]] std::size_t nearest_peak(std::span<const double> x) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < peaks_.size(); ++j) {
      const double d = norm_l2(subtract(x, peaks_[j].center));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    return best;
  }

 private:
  std::vector<Peak> peaks_;
  Composition composition_;
  double temperature_;
};

/// One member of the bundled two-peak suite: a start point plus a landscape
/// with a sharp peak (height 1.2) and a flat peak (height 1.0) placed around it.
struct LandscapeCase {
  std::uint64_t seed = 0;
  Vec start;
  SyntheticLandscape landscape;
  double flat_width = 0.0;
};

struct LandscapeSuiteSpec {
  std::size_t dim = 8;
  double sharp_width = 0.05;
  double flat_width = 0.2;
  double center_offset = 0.1;  // per-coordinate peak offset from the start, U(-o, o)
  double start_lo = 0.3;
  double start_hi = 0.7;
};

inline LandscapeCase bundled_landscape_case(std::uint64_t seed, const LandscapeSuiteSpec& spec = {}) {
  CounterRng rng(seed, 0x1a4d);
  Vec start(spec.dim);
  rng.fill_uniform(start, spec.start_lo, spec.start_hi);
  Vec sharp(spec.dim);
  Vec flat(spec.dim);
  for (std::size_t d = 0; d < spec.dim; ++d) {
    sharp[d] = start[d] + rng.uniform(-spec.center_offset, spec.center_offset);
    flat[d] = start[d] + rng.uniform(-spec.center_offset, spec.center_offset);
  }
  SyntheticLandscape land({{std::move(sharp), 1.2, spec.sharp_width, PeakKind::Sharp},
                           {std::move(flat), 1.0, spec.flat_width, PeakKind::Flat}});
  return {seed, std::move(start), std::move(land), spec.flat_width};
}

}  // namespace ggs

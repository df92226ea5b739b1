#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ggs/core.hpp"
#include "ggs/csv.hpp"
#include "ggs/oracle.hpp"
#include "ggs/rng.hpp"

namespace ggs {

enum class DirectionDistribution {
  UnitGaussian,     // Gaussian draw scaled to unit l2 norm
  SignedRademacher  // +-1 per coordinate (an l-infinity style probe)
};

inline const char* to_string(DirectionDistribution d) {
  return d == DirectionDistribution::UnitGaussian ? "unit_gaussian" : "signed_rademacher";
}

struct ProbeSpec {
  std::size_t num_directions = 8;
  Vec magnitudes{-0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2};
  DirectionDistribution distribution = DirectionDistribution::UnitGaussian;
  std::uint64_t seed = 0;
  Box box{};  // probe points are clipped to this box before evaluation
  std::optional<double> flatness_radius;

  void validate() const {
    require(num_directions >= 1, "probe: num_directions must be >= 1");
    require(!magnitudes.empty(), "probe: magnitudes must be nonempty");
    require(std::find(magnitudes.begin(), magnitudes.end(), 0.0) != magnitudes.end(),
            "probe: magnitudes must contain 0 (the surface center)");
    require(std::is_sorted(magnitudes.begin(), magnitudes.end()), "probe: magnitudes must be sorted ascending");
  }
};

struct ProbeSample {
  std::size_t direction_id = 0;
  double magnitude_a = 0.0;
  double magnitude_b = 0.0;
  double loss = 0.0;
};

struct FlatnessReport {
  bool two_dimensional = false;
  Vec magnitudes;
  /// 1-D: one row per magnitude, one column. 2-D: grid[a][b].
  std::vector<Vec> grid;
  std::vector<ProbeSample> samples;
  double center_loss = 0.0;
  double max_loss = 0.0;
  double flatness = 0.0;
  double sharpness = 0.0;
  std::optional<double> radius;
};

struct FlatnessSummary {
  double flatness = 0.0;
  double max_loss = 0.0;
  double sharpness = 0.0;  // center loss minus mean loss at the radius
};

namespace detail {

inline Vec draw_direction(std::size_t dim, DirectionDistribution dist, CounterRng& rng) {
  Vec d(dim);
  if (dist == DirectionDistribution::SignedRademacher) {
    for (double& e : d) e = (rng.next() >> 63) ? 1.0 : -1.0;
    return d;
  }
  for (double& e : d) e = rng.normal();
  const double n = norm_l2(d);
  for (double& e : d) e /= n;
  return d;
}

inline std::size_t center_index(const Vec& magnitudes) {
  return static_cast<std::size_t>(std::find(magnitudes.begin(), magnitudes.end(), 0.0) - magnitudes.begin());
}

}  // namespace detail

/// Relative retained loss at `radius`:
///   flatness = 1 - (center - mean_at_radius) / max(center, 1e-12),
/// clamped to [0, 1]; max_loss is the center loss. For 2-D reports the
/// entries on the square ring max(|a|, |b|) = radius are averaged.
inline FlatnessSummary flatness_metrics(const FlatnessReport& report, double radius) {
  require(radius > 0.0, "flatness_metrics: radius must be positive");
  const auto matches = [radius](double m) { return std::abs(std::abs(m) - radius) <= 1e-12 * std::max(1.0, radius); };
  const auto& mags = report.magnitudes;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t a = 0; a < mags.size(); ++a) {
    if (!report.two_dimensional) {
      if (matches(mags[a])) {
        total += report.grid[a][0];
        ++count;
      }
      continue;
    }
    for (std::size_t b = 0; b < mags.size(); ++b) {
      const double ring = std::max(std::abs(mags[a]), std::abs(mags[b]));
      if (matches(ring)) {
        total += report.grid[a][b];
        ++count;
      }
    }
  }
  require(count > 0, "flatness_metrics: radius " + format_double(radius) + " is not one of the probed magnitudes");
  const double at_radius = total / static_cast<double>(count);
  FlatnessSummary out;
  out.max_loss = report.center_loss;
  out.sharpness = report.center_loss - at_radius;
  out.flatness = std::clamp(1.0 - out.sharpness / std::max(report.center_loss, 1e-12), 0.0, 1.0);
  return out;
}

inline void apply_flatness(FlatnessReport& report, std::optional<double> radius) {
  report.max_loss = report.center_loss;
  if (!radius) return;
  const FlatnessSummary s = flatness_metrics(report, *radius);
  report.radius = radius;
  report.flatness = s.flatness;
  report.sharpness = s.sharpness;
}

/// Mean loss per magnitude over random directions: row m holds
/// mean_k L(clip(x + m d_k)).
inline FlatnessReport probe_1d(const GradientOracle& oracle, std::span<const double> x_adv, std::size_t label,
                               const ProbeSpec& spec) {
  spec.validate();
  require(x_adv.size() == oracle.input_dim(), "probe_1d: input dimension mismatch");
  CounterRng rng(spec.seed);
  FlatnessReport report;
  report.magnitudes = spec.magnitudes;
  report.grid.assign(spec.magnitudes.size(), Vec(1, 0.0));
  Vec point(x_adv.size());
  for (std::size_t k = 0; k < spec.num_directions; ++k) {
    const Vec d = detail::draw_direction(x_adv.size(), spec.distribution, rng);
    for (std::size_t a = 0; a < spec.magnitudes.size(); ++a) {
      const double m = spec.magnitudes[a];
      for (std::size_t i = 0; i < point.size(); ++i) point[i] = spec.box.clip(x_adv[i] + m * d[i]);
      const double l = oracle.loss(point, label);
      report.samples.push_back({k, m, 0.0, l});
      report.grid[a][0] += l;
    }
  }
  for (auto& row : report.grid) row[0] /= static_cast<double>(spec.num_directions);
  report.center_loss = report.grid[detail::center_index(spec.magnitudes)][0];
  apply_flatness(report, spec.flatness_radius);
  return report;
}

/// grid[a][b] = mean_k L(clip(x + a d1_k + b d2_k)) over direction pairs.
inline FlatnessReport probe_2d(const GradientOracle& oracle, std::span<const double> x_adv, std::size_t label,
                               const ProbeSpec& spec) {
  spec.validate();
  require(x_adv.size() == oracle.input_dim(), "probe_2d: input dimension mismatch");
  CounterRng rng(spec.seed);
  const std::size_t n = spec.magnitudes.size();
  FlatnessReport report;
  report.two_dimensional = true;
  report.magnitudes = spec.magnitudes;
  report.grid.assign(n, Vec(n, 0.0));
  Vec point(x_adv.size());
  for (std::size_t k = 0; k < spec.num_directions; ++k) {
    const Vec d1 = detail::draw_direction(x_adv.size(), spec.distribution, rng);
    const Vec d2 = detail::draw_direction(x_adv.size(), spec.distribution, rng);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double ma = spec.magnitudes[a];
        const double mb = spec.magnitudes[b];
        for (std::size_t i = 0; i < point.size(); ++i) point[i] = spec.box.clip(x_adv[i] + ma * d1[i] + mb * d2[i]);
        const double l = oracle.loss(point, label);
        report.samples.push_back({k, ma, mb, l});
        report.grid[a][b] += l;
      }
    }
  }
  for (auto& row : report.grid)
    for (double& e : row) e /= static_cast<double>(spec.num_directions);
  const std::size_t c = detail::center_index(spec.magnitudes);
  report.center_loss = report.grid[c][c];
  apply_flatness(report, spec.flatness_radius);
  return report;
}

/// Long-form CSV: example_id, direction_id, magnitude_a, magnitude_b, loss.
inline void write_probe_csv(std::ostream& out, const std::vector<std::pair<std::string, FlatnessReport>>& reports) {
  CsvWriter csv(out);
  csv.row({"example_id", "direction_id", "magnitude_a", "magnitude_b", "loss"});
  for (const auto& [example_id, report] : reports) {
    for (const ProbeSample& s : report.samples) {
      csv.field(example_id).field(static_cast<std::uint64_t>(s.direction_id)).field(s.magnitude_a).field(s.magnitude_b).field(s.loss);
      csv.end_row();
    }
  }
}

}  // namespace ggs

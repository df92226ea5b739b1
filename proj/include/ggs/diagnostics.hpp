#pragma once

#include <vector>

#include "ggs/core.hpp"

namespace ggs {

struct CosineProfile {
  Vec values;                       // cos(g_i, mean) for i = 1..N
  bool degenerate = false;          // the mean gradient vanished
  std::vector<std::size_t> zero_gradients;  // indices i (0-based) with g_i = 0
};

/// Cosine similarity of each inner gradient with the mean inner gradient.
/// Zero gradients score 0 and are flagged; a vanishing mean (for example two
/// antipodal gradients) marks the whole profile degenerate with all zeros.
inline CosineProfile inner_cosine_profile(const std::vector<Vec>& gradient_log) {
  require(gradient_log.size() >= 2, "inner_cosine_profile: need at least two gradients");
  const std::size_t dim = gradient_log.front().size();
  Vec mean(dim, 0.0);
  double largest = 0.0;
  for (const Vec& g : gradient_log) {
    require(g.size() == dim, "inner_cosine_profile: gradients differ in length");
    axpy(1.0, g, mean);
    largest = std::max(largest, norm_l2(g));
  }
  for (double& e : mean) e /= static_cast<double>(gradient_log.size());

  CosineProfile profile;
  profile.values.assign(gradient_log.size(), 0.0);
  for (std::size_t i = 0; i < gradient_log.size(); ++i)
    if (norm_l2(gradient_log[i]) == 0.0) profile.zero_gradients.push_back(i);

  if (largest == 0.0 || norm_l2(mean) <= 1e-14 * largest) {
    profile.degenerate = true;
    return profile;
  }
  for (std::size_t i = 0; i < gradient_log.size(); ++i) profile.values[i] = cosine_similarity(gradient_log[i], mean);
  return profile;
}

/// Mean of profile entries in [first, last) (0-based, clamped to the profile).
inline double profile_mean(const Vec& profile, std::size_t first, std::size_t last) {
  last = std::min(last, profile.size());
  if (first >= last) return 0.0;
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) s += profile[i];
  return s / static_cast<double>(last - first);
}

}  // namespace ggs

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace ggs {

/// Counter-based generator built on the SplitMix64 output function.
///
/// The n-th 64-bit output (n = 1, 2, ...) of a stream with key k is
/// mix(k + n * 0x9e3779b97f4a7c15), which is exactly the sequence produced by
/// the reference SplitMix64 seeded with k. Because each output is a pure
/// function of (key, counter), any position can be reached in O(1) and
/// independent streams are derived by hashing (key, stream id) into a new key.
///
/// Uniform doubles use the top 53 bits: u = (x >> 11) * 2^-53, u in [0, 1).
/// A Uniform(lo, hi) draw is lo + (hi - lo) * u. Vector fills consume one
/// output per coordinate in increasing coordinate order.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_(stream == 0 ? seed : derive_key(seed, stream)) {}

  [[nodiscard]] static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(key_ + (++counter_) * kGamma); }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes two outputs per call.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  void fill_uniform(std::span<double> out, double lo, double hi) {
    for (double& e : out) e = uniform(lo, hi);
  }

  /// Independent child stream; does not advance this generator.
  [[nodiscard]] CounterRng split(std::uint64_t stream) const {
    CounterRng child;
    child.key_ = derive_key(key_, stream);
    return child;
  }

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

 private:
  static constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t stream) {
    return mix(mix(key ^ 0x6a09e667f3bcc909ULL) + stream * kGamma);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace ggs

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ggs {

using Vec = std::vector<double>;
using Shape = std::vector<std::size_t>;

/// Raised when a caller breaks a documented precondition (shape mismatch,
/// invalid label, out-of-range parameter).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised by gradient oracles that cannot produce a finite loss or gradient.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

/// Valid value range of every input coordinate.
struct Box {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] bool contains(double v) const { return v >= lo && v <= hi; }
  [[nodiscard]] double clip(double v) const { return std::clamp(v, lo, hi); }
  [[nodiscard]] static Box unbounded() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
};

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

/// A point in input space together with its logical shape (C x H x W or D).
class InputPoint {
 public:
  InputPoint() = default;
  explicit InputPoint(Vec values) : values_(std::move(values)), shape_{values_.size()} {}
  InputPoint(Vec values, Shape shape) : values_(std::move(values)), shape_(std::move(shape)) {
    require(!shape_.empty(), "InputPoint: shape must have at least one dimension");
    require(shape_size(shape_) == values_.size(), "InputPoint: shape product does not match value count");
  }

  [[nodiscard]] const Vec& values() const { return values_; }
  [[nodiscard]] Vec& values() { return values_; }
  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::span<const double> view() const { return values_; }

  [[nodiscard]] InputPoint with_values(Vec values) const { return InputPoint(std::move(values), shape_); }

  bool operator==(const InputPoint&) const = default;

 private:
  Vec values_;
  Shape shape_;
};

namespace testing_hooks {
/// Value returned by sign(0). Production code never changes this; the
/// verification battery flips it to 1 to prove the degeneration check can
/// detect a wrong sign convention.
inline std::atomic<int> sign_of_zero{0};
}  // namespace testing_hooks

/// Element-wise sign with sign(0) = 0.
inline double sign(double v) {
  if (v > 0.0) return 1.0;
  if (v < 0.0) return -1.0;
  return static_cast<double>(testing_hooks::sign_of_zero.load(std::memory_order_relaxed));
}

inline Vec sign(std::span<const double> v) {
  Vec out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double e) { return sign(e); });
  return out;
}

inline double norm_l1(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += std::abs(e);
  return s;
}

inline double norm_l2(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

inline double norm_linf(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vec add(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "add: length mismatch");
  Vec out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

inline Vec subtract(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "subtract: length mismatch");
  Vec out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

inline Vec scaled(std::span<const double> v, double k) {
  Vec out(v.begin(), v.end());
  for (double& e : out) e *= k;
  return out;
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

inline Vec clip_to_box(std::span<const double> v, Box box) {
  Vec out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [box](double e) { return box.clip(e); });
  return out;
}

/// Cosine similarity; returns 0 when either argument is the zero vector.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = norm_l2(a);
  const double nb = norm_l2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

inline std::size_t argmax(std::span<const double> v) {
  require(!v.empty(), "argmax: empty vector");
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

}  // namespace ggs

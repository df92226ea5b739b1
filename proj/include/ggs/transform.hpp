#pragma once

#include <cstddef>
#include <vector>

#include "ggs/config.hpp"
#include "ggs/core.hpp"
#include "ggs/rng.hpp"

namespace ggs {

/// A sampled linear input transform: out[j] = source[j] >= 0 ? x[source[j]] : 0.
/// Both the resize-and-pad transform and the identity are of this form, so
/// the gradient pulls back exactly through the adjoint.
struct AppliedTransform {
  Vec values;
  std::vector<std::ptrdiff_t> source;

  [[nodiscard]] Vec pullback(std::span<const double> grad_out) const {
    require(grad_out.size() == source.size(), "transform pullback: gradient length mismatch");
    Vec grad(source.size(), 0.0);
    for (std::size_t j = 0; j < source.size(); ++j)
      if (source[j] >= 0) grad[static_cast<std::size_t>(source[j])] += grad_out[j];
    return grad;
  }
};

/// Nearest-neighbour shrink to a random extent in [ceil(min_scale * H), H] x
/// [ceil(min_scale * W), W], zero-padded back to H x W at a random offset.
/// Shapes C x H x W, H x W, and flat D (treated as 1 x D) are accepted; all
/// channels share the same resize.
inline AppliedTransform resize_and_pad(std::span<const double> x, const Shape& shape, double min_scale,
                                       CounterRng& rng) {
  require(shape_size(shape) == x.size(), "resize_and_pad: shape does not match input");
  std::size_t channels = 1, height = 1, width = x.size();
  if (shape.size() == 3) {
    channels = shape[0];
    height = shape[1];
    width = shape[2];
  } else if (shape.size() == 2) {
    height = shape[0];
    width = shape[1];
  }

  auto draw_extent = [&](std::size_t full) {
    const auto lo = static_cast<std::size_t>(std::ceil(min_scale * static_cast<double>(full)));
    const std::size_t smallest = std::clamp<std::size_t>(lo, 1, full);
    return smallest + static_cast<std::size_t>(rng.next() % (full - smallest + 1));
  };
  const std::size_t new_h = draw_extent(height);
  const std::size_t new_w = draw_extent(width);
  const std::size_t top = static_cast<std::size_t>(rng.next() % (height - new_h + 1));
  const std::size_t left = static_cast<std::size_t>(rng.next() % (width - new_w + 1));

  AppliedTransform out;
  out.values.assign(x.size(), 0.0);
  out.source.assign(x.size(), -1);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t r = 0; r < new_h; ++r) {
      const std::size_t src_r = r * height / new_h;
      for (std::size_t q = 0; q < new_w; ++q) {
        const std::size_t src_q = q * width / new_w;
        const std::size_t dst = (c * height + top + r) * width + left + q;
        const std::size_t src = (c * height + src_r) * width + src_q;
        out.source[dst] = static_cast<std::ptrdiff_t>(src);
        out.values[dst] = x[src];
      }
    }
  }
  return out;
}

inline AppliedTransform apply_transform(const TransformSpec& spec, std::span<const double> x, const Shape& shape,
                                        CounterRng& rng) {
  if (spec.kind == TransformKind::ResizePad) return resize_and_pad(x, shape, spec.min_scale, rng);
  AppliedTransform out;
  out.values.assign(x.begin(), x.end());
  out.source.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out.source[j] = static_cast<std::ptrdiff_t>(j);
  return out;
}

}  // namespace ggs

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "ggs/core.hpp"
#include "ggs/rng.hpp"

namespace ggs {

/// Labeled classification set. Every input shares `shape`.
struct Dataset {
  std::string id;
  Shape shape;
  std::size_t num_classes = 0;
  std::vector<Vec> inputs;
  std::vector<std::size_t> labels;

  [[nodiscard]] std::size_t size() const { return inputs.size(); }
  [[nodiscard]] std::size_t dim() const { return shape_size(shape); }
  [[nodiscard]] InputPoint point(std::size_t i) const { return InputPoint(inputs[i], shape); }

  void validate() const {
    require(!inputs.empty(), "dataset '" + id + "' is empty");
    require(inputs.size() == labels.size(), "dataset '" + id + "': inputs and labels differ in length");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      require(inputs[i].size() == dim(), "dataset '" + id + "': input " + std::to_string(i) + " has wrong size");
      require(labels[i] < num_classes, "dataset '" + id + "': label out of range at " + std::to_string(i));
    }
  }
};

struct TrainEvalSplit {
  Dataset train;
  Dataset eval;
};

/// Gaussian-blob classification task inside the unit box.
///
/// Each class is a mixture of `modes_per_class` isotropic Gaussians whose
/// means are drawn uniformly from [center_lo, center_hi]^dim. Samples are
/// clipped to [0, 1]. Train and eval splits come from independent streams of
/// the same generator seed.
struct BlobSpec {
  std::size_t dim = 8;
  std::size_t classes = 3;
  std::size_t points_per_class = 300;
  std::size_t eval_points_per_class = 100;
  std::size_t modes_per_class = 1;
  double spread = 0.06;
  double center_lo = 0.35;
  double center_hi = 0.65;
  std::uint64_t seed = 1;
};

inline TrainEvalSplit make_blobs(const BlobSpec& spec) {
  require(spec.dim > 0 && spec.classes >= 2, "blobs: need dim > 0 and at least two classes");
  require(spec.points_per_class > 0 && spec.modes_per_class > 0, "blobs: empty class");
  require(spec.spread > 0.0, "blobs: spread must be positive");

  CounterRng center_rng(spec.seed, 1);
  std::vector<std::vector<Vec>> means(spec.classes);
  for (auto& class_means : means) {
    for (std::size_t m = 0; m < spec.modes_per_class; ++m) {
      Vec mu(spec.dim);
      center_rng.fill_uniform(mu, spec.center_lo, spec.center_hi);
      class_means.push_back(std::move(mu));
    }
  }

  auto sample = [&](std::uint64_t stream, std::size_t per_class, const std::string& suffix) {
    CounterRng rng(spec.seed, stream);
    Dataset ds;
    ds.id = "blobs-d" + std::to_string(spec.dim) + "-k" + std::to_string(spec.classes) + "-s" +
            std::to_string(spec.seed) + suffix;
    ds.shape = {spec.dim};
    ds.num_classes = spec.classes;
    // Interleave classes so prefixes of the set stay label-balanced.
    for (std::size_t i = 0; i < per_class; ++i) {
      for (std::size_t k = 0; k < spec.classes; ++k) {
        const Vec& mu = means[k][i % spec.modes_per_class];
        Vec x(spec.dim);
        for (std::size_t d = 0; d < spec.dim; ++d) x[d] = std::clamp(mu[d] + spec.spread * rng.normal(), 0.0, 1.0);
        ds.inputs.push_back(std::move(x));
        ds.labels.push_back(k);
      }
    }
    return ds;
  };

  return {sample(2, spec.points_per_class, "-train"), sample(3, spec.eval_points_per_class, "-eval")};
}

/// Bundled task: 8-D (or 2-D) blobs, three classes, 300 points per class.
inline TrainEvalSplit bundled_blobs(std::uint64_t seed = 1, std::size_t dim = 8) {
  BlobSpec spec;
  spec.dim = dim;
  spec.seed = seed;
  return make_blobs(spec);
}

// ---------------------------------------------------------------------------
// Flat binary grayscale image set (little-endian):
//   "GGSD" | u32 version (1) | u32 count | u32 height | u32 width | u32 classes
//   then `count` records of: u8 label | height*width u8 pixels
// Pixels are scaled to [0, 1] by dividing by 255. See docs/dataset_format.md.
// ---------------------------------------------------------------------------

class DatasetFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Dataset decode_grayscale(std::span<const std::uint8_t> bytes, const std::string& id) {
  auto u32_at = [&](std::size_t pos) {
    if (pos + 4 > bytes.size()) throw DatasetFormatError("dataset file truncated in header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
    return v;
  };
  if (bytes.size() < 24 || std::string(bytes.begin(), bytes.begin() + 4) != "GGSD")
    throw DatasetFormatError("not a grayscale dataset file (bad magic)");
  if (u32_at(4) != 1) throw DatasetFormatError("unsupported dataset format version");
  const std::size_t count = u32_at(8);
  const std::size_t height = u32_at(12);
  const std::size_t width = u32_at(16);
  const std::size_t classes = u32_at(20);
  const std::size_t record = 1 + height * width;
  if (height == 0 || width == 0 || classes < 2) throw DatasetFormatError("invalid dataset dimensions");
  if (bytes.size() != 24 + count * record) throw DatasetFormatError("dataset payload size does not match header");

  Dataset ds;
  ds.id = id;
  ds.shape = {1, height, width};
  ds.num_classes = classes;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t base = 24 + i * record;
    if (bytes[base] >= classes) throw DatasetFormatError("label out of range in record " + std::to_string(i));
    ds.labels.push_back(bytes[base]);
    Vec x(height * width);
    for (std::size_t p = 0; p < x.size(); ++p) x[p] = bytes[base + 1 + p] / 255.0;
    ds.inputs.push_back(std::move(x));
  }
  return ds;
}

inline std::vector<std::uint8_t> encode_grayscale(const Dataset& ds) {
  require(ds.shape.size() == 3 && ds.shape[0] == 1, "encode_grayscale: expected 1 x H x W inputs");
  std::vector<std::uint8_t> out{'G', 'G', 'S', 'D'};
  auto put = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put(1);
  put(static_cast<std::uint32_t>(ds.size()));
  put(static_cast<std::uint32_t>(ds.shape[1]));
  put(static_cast<std::uint32_t>(ds.shape[2]));
  put(static_cast<std::uint32_t>(ds.num_classes));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out.push_back(static_cast<std::uint8_t>(ds.labels[i]));
    for (double v : ds.inputs[i]) out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  return out;
}

inline Dataset load_grayscale(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetFormatError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_grayscale(bytes, path.filename().string());
}

/// Deterministic split of a loaded set: every `eval_every`-th example goes
/// to the eval split.
inline TrainEvalSplit split_every(const Dataset& ds, std::size_t eval_every) {
  require(eval_every >= 2, "split_every: eval_every must be at least 2");
  TrainEvalSplit out;
  out.train = ds;
  out.eval = ds;
  out.train.inputs.clear();
  out.train.labels.clear();
  out.eval.inputs.clear();
  out.eval.labels.clear();
  out.train.id += "-train";
  out.eval.id += "-eval";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Dataset& dst = (i % eval_every == eval_every - 1) ? out.eval : out.train;
    dst.inputs.push_back(ds.inputs[i]);
    dst.labels.push_back(ds.labels[i]);
  }
  return out;
}

}  // namespace ggs

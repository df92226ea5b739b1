#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "ggs/core.hpp"
#include "ggs/oracle.hpp"
#include "ggs/softmax.hpp"

namespace ggs {

enum class Activation : std::uint32_t { Identity = 0, Tanh = 1, Softplus = 2 };

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::Identity:
      return z;
    case Activation::Tanh:
      return std::tanh(z);
    case Activation::Softplus:
      return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  return z;
}

inline double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::Identity:
      return 1.0;
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Softplus:
      return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }
  return 1.0;
}

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::Identity:
      return "identity";
    case Activation::Tanh:
      return "tanh";
    case Activation::Softplus:
      return "softplus";
  }
  return "?";
}

/// Dense network descriptor, flat parameter vector and training metadata.
///
/// `widths` = {input, hidden..., classes}. Parameters are stored layer by
/// layer: the (out x in) row-major weight matrix followed by the bias.
/// The activation applies to every hidden layer; the output layer is linear.
struct ToyModel {
  std::vector<std::size_t> widths;
  Activation activation = Activation::Tanh;
  Vec parameters;

  std::string dataset_id;
  std::uint64_t seed = 0;
  std::uint64_t epochs = 0;
  double learning_rate = 0.0;
  double final_accuracy = 0.0;

  [[nodiscard]] std::size_t input_dim() const { return widths.front(); }
  [[nodiscard]] std::size_t num_classes() const { return widths.back(); }
  [[nodiscard]] std::size_t num_layers() const { return widths.size() - 1; }

  [[nodiscard]] static std::size_t parameter_count(const std::vector<std::size_t>& widths) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l] * widths[l + 1] + widths[l + 1];
    return n;
  }

  void validate() const {
    require(widths.size() >= 2, "ToyModel: need at least input and output widths");
    for (std::size_t w : widths) require(w > 0, "ToyModel: layer widths must be positive");
    require(parameters.size() == parameter_count(widths), "ToyModel: parameter vector length mismatch");
  }

  bool operator==(const ToyModel&) const = default;
};

/// Cross-entropy classifier over a ToyModel with analytic backpropagation.
class MlpOracle final : public Classifier {
 public:
  explicit MlpOracle(ToyModel model) : model_(std::move(model)) {
    model_.validate();
    std::size_t offset = 0;
    for (std::size_t l = 0; l < model_.num_layers(); ++l) {
      LinearLayer layer;
      layer.in = model_.widths[l];
      layer.out = model_.widths[l + 1];
      const auto w_begin = model_.parameters.begin() + static_cast<std::ptrdiff_t>(offset);
      layer.weights.assign(w_begin, w_begin + static_cast<std::ptrdiff_t>(layer.in * layer.out));
      offset += layer.in * layer.out;
      const auto b_begin = model_.parameters.begin() + static_cast<std::ptrdiff_t>(offset);
      layer.bias.assign(b_begin, b_begin + static_cast<std::ptrdiff_t>(layer.out));
      offset += layer.out;
      layers_.push_back(std::move(layer));
    }
  }

  [[nodiscard]] std::size_t input_dim() const override { return model_.input_dim(); }
  [[nodiscard]] std::size_t num_classes() const override { return model_.num_classes(); }
  [[nodiscard]] const ToyModel& model() const { return model_; }

  [[nodiscard]] Vec logits(std::span<const double> x) const override {
    require(x.size() == input_dim(), "mlp: input dimension mismatch");
    return forward(x).back();
  }

  [[nodiscard]] double loss(std::span<const double> x, std::size_t label) const override {
    check_input(x, label);
    return cross_entropy(forward(x).back(), label);
  }

  [[nodiscard]] LossGrad loss_and_gradient(std::span<const double> x, std::size_t label) const override {
    check_input(x, label);
    const auto pre = forward(x);
    const double loss_value = cross_entropy(pre.back(), label);
    Vec delta = softmax(pre.back());
    delta[label] -= 1.0;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      Vec upstream = layers_[l].backward(delta);
      if (l == 0) return {loss_value, std::move(upstream)};
      for (std::size_t i = 0; i < upstream.size(); ++i) upstream[i] *= activate_derivative(model_.activation, pre[l][i]);
      delta = std::move(upstream);
    }
    return {loss_value, {}};
  }

  /// Adds d loss / d parameters at (x, label) into `grad` (same layout as
  /// ToyModel::parameters) and returns the loss.
  double accumulate_parameter_gradient(std::span<const double> x, std::size_t label, std::span<double> grad) const {
    check_input(x, label);
    require(grad.size() == model_.parameters.size(), "mlp: parameter gradient length mismatch");
    const auto pre = forward(x);
    const double loss_value = cross_entropy(pre.back(), label);
    Vec delta = softmax(pre.back());
    delta[label] -= 1.0;

    std::vector<std::size_t> offsets(layers_.size());
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      offsets[l] = offset;
      offset += layers_[l].in * layers_[l].out + layers_[l].out;
    }

    for (std::size_t l = layers_.size(); l-- > 0;) {
      const LinearLayer& layer = layers_[l];
      // Input to layer l: x for l == 0, otherwise act(pre[l]).
      Vec input(x.begin(), x.end());
      if (l > 0) {
        input = pre[l];
        for (double& e : input) e = activate(model_.activation, e);
      }
      double* gw = grad.data() + offsets[l];
      double* gb = gw + layer.in * layer.out;
      for (std::size_t r = 0; r < layer.out; ++r) {
        for (std::size_t c = 0; c < layer.in; ++c) gw[r * layer.in + c] += delta[r] * input[c];
        gb[r] += delta[r];
      }
      if (l == 0) break;
      Vec upstream = layer.backward(delta);
      for (std::size_t i = 0; i < upstream.size(); ++i) upstream[i] *= activate_derivative(model_.activation, pre[l][i]);
      delta = std::move(upstream);
    }
    return loss_value;
  }

 private:
  // pre[0] = x; pre[l] = pre-activation output of layer l-1; the last entry
  // holds the logits.
  [[nodiscard]] std::vector<Vec> forward(std::span<const double> x) const {
    std::vector<Vec> pre;
    pre.reserve(layers_.size() + 1);
    pre.emplace_back(x.begin(), x.end());
    Vec a(x.begin(), x.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Vec z = layers_[l].forward(a);
      if (l + 1 < layers_.size()) {
        a = z;
        for (double& e : a) e = activate(model_.activation, e);
      }
      pre.push_back(std::move(z));
    }
    return pre;
  }

  ToyModel model_;
  std::vector<LinearLayer> layers_;
};

inline Vec mlp_logits(const ToyModel& model, std::span<const double> x) { return MlpOracle(model).logits(x); }

inline LossGrad mlp_loss_grad(const ToyModel& model, std::span<const double> x, std::size_t label) {
  return MlpOracle(model).loss_and_gradient(x, label);
}

// ---------------------------------------------------------------------------
// Binary model format (all integers and doubles little-endian):
//   "GGSM" | u32 version | u32 activation | u32 width count | u64 widths[]
//   | u64 seed | u64 epochs | f64 learning_rate | f64 final_accuracy
//   | u32 dataset id length | dataset id bytes | u64 parameter count
//   | f64 parameters[]
// See docs/model_format.md.
// ---------------------------------------------------------------------------

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t uint(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) throw ModelFormatError("model file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw ModelFormatError("model file truncated");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  [[nodiscard]] bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode_model(const ToyModel& model) {
  model.validate();
  std::vector<std::uint8_t> out{'G', 'G', 'S', 'M'};
  detail::put_u32(out, kModelFormatVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(model.activation));
  detail::put_u32(out, static_cast<std::uint32_t>(model.widths.size()));
  for (std::size_t w : model.widths) detail::put_u64(out, w);
  detail::put_u64(out, model.seed);
  detail::put_u64(out, model.epochs);
  detail::put_f64(out, model.learning_rate);
  detail::put_f64(out, model.final_accuracy);
  detail::put_u32(out, static_cast<std::uint32_t>(model.dataset_id.size()));
  out.insert(out.end(), model.dataset_id.begin(), model.dataset_id.end());
  detail::put_u64(out, model.parameters.size());
  for (double p : model.parameters) detail::put_f64(out, p);
  return out;
}

inline ToyModel decode_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  if (in.str(4) != "GGSM") throw ModelFormatError("not a model file (bad magic)");
  const std::uint32_t version = in.u32();
  if (version != kModelFormatVersion)
    throw ModelFormatError("unsupported model format version " + std::to_string(version));
  ToyModel model;
  const std::uint32_t activation = in.u32();
  if (activation > 2) throw ModelFormatError("unknown activation code " + std::to_string(activation));
  model.activation = static_cast<Activation>(activation);
  const std::uint32_t width_count = in.u32();
  if (width_count < 2 || width_count > 64) throw ModelFormatError("implausible layer count");
  for (std::uint32_t i = 0; i < width_count; ++i) model.widths.push_back(in.u64());
  model.seed = in.u64();
  model.epochs = in.u64();
  model.learning_rate = in.f64();
  model.final_accuracy = in.f64();
  model.dataset_id = in.str(in.u32());
  const std::uint64_t count = in.u64();
  if (count != ToyModel::parameter_count(model.widths)) throw ModelFormatError("parameter count does not match widths");
  model.parameters.resize(count);
  for (double& p : model.parameters) p = in.f64();
  if (!in.done()) throw ModelFormatError("trailing bytes after model payload");
  return model;
}

inline void save_model(const ToyModel& model, const std::filesystem::path& path) {
  const auto bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelFormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline ToyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(bytes);
}

}  // namespace ggs

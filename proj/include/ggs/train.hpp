#pragma once

#include <string>
#include <vector>

#include "ggs/dataset.hpp"
#include "ggs/mlp.hpp"
#include "ggs/rng.hpp"

namespace ggs {

class TrainingFailure : public std::runtime_error {
 public:
  TrainingFailure(const std::string& message, double accuracy) : std::runtime_error(message), accuracy_(accuracy) {}
  [[nodiscard]] double accuracy() const { return accuracy_; }

 private:
  double accuracy_;
};

struct TrainSpec {
  std::vector<std::size_t> hidden;  // empty = linear softmax
  Activation activation = Activation::Tanh;
  std::uint64_t seed = 0;
  std::size_t epochs = 400;
  double learning_rate = 0.5;
  double momentum = 0.9;
  double accuracy_floor = 0.9;
};

inline double accuracy(const Classifier& model, const Dataset& ds) {
  if (ds.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) correct += model.predict(ds.inputs[i]) == ds.labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

/// Glorot-uniform weights drawn from `seed`, zero biases.
inline ToyModel initialize_model(std::vector<std::size_t> widths, Activation activation, std::uint64_t seed) {
  ToyModel model;
  model.widths = std::move(widths);
  model.activation = activation;
  model.seed = seed;
  model.parameters.reserve(ToyModel::parameter_count(model.widths));
  CounterRng rng(seed, 0x7a11);
  for (std::size_t l = 0; l + 1 < model.widths.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(model.widths[l] + model.widths[l + 1]));
    for (std::size_t i = 0; i < model.widths[l] * model.widths[l + 1]; ++i)
      model.parameters.push_back(rng.uniform(-limit, limit));
    model.parameters.insert(model.parameters.end(), model.widths[l + 1], 0.0);
  }
  return model;
}

/// Deterministic full-batch gradient descent (heavy-ball momentum) on the
/// mean cross-entropy. Throws TrainingFailure when the final training
/// accuracy is below the floor.
inline ToyModel train_toy_model(const Dataset& data, const TrainSpec& spec) {
  data.validate();
  require(spec.epochs > 0, "train_toy_model: epochs must be positive");
  require(spec.learning_rate > 0.0, "train_toy_model: learning rate must be positive");

  std::vector<std::size_t> widths{data.dim()};
  widths.insert(widths.end(), spec.hidden.begin(), spec.hidden.end());
  widths.push_back(data.num_classes);
  ToyModel model = initialize_model(widths, spec.activation, spec.seed);

  Vec velocity(model.parameters.size(), 0.0);
  Vec grad(model.parameters.size());
  const double scale = 1.0 / static_cast<double>(data.size());
  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    const MlpOracle current(model);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) current.accumulate_parameter_gradient(data.inputs[i], data.labels[i], grad);
    for (std::size_t p = 0; p < grad.size(); ++p) {
      velocity[p] = spec.momentum * velocity[p] - spec.learning_rate * scale * grad[p];
      model.parameters[p] += velocity[p];
    }
  }

  model.dataset_id = data.id;
  model.epochs = spec.epochs;
  model.learning_rate = spec.learning_rate;
  model.final_accuracy = accuracy(MlpOracle(model), data);
  if (model.final_accuracy < spec.accuracy_floor) {
    throw TrainingFailure("training reached accuracy " + std::to_string(model.final_accuracy) + " below floor " +
                              std::to_string(spec.accuracy_floor),
                          model.final_accuracy);
  }
  return model;
}

}  // namespace ggs

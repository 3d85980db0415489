#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roughcalib/nn/layers.hpp"
#include "roughcalib/nn/tensor.hpp"
#include "roughcalib/random.hpp"

namespace roughcalib::nn {

// Layer stack applied to a single-channel input of length input_length.
// The last layer must be Dense; its unit count is the output dimension and
// no nonlinearity follows it.
struct NetworkConfig {
  std::size_t input_length = 0;
  std::vector<LayerSpec> layers;

  std::size_t output_dim() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Three conv(k=20) + LeakyReLU(0.1) + maxpool(3) + dropout blocks with 32,
// 64 and 128 filters, dropout 0.25/0.25/0.4, then flatten, dense(128),
// LeakyReLU, dropout 0.3 and the linear output layer.
NetworkConfig hurst_cnn_config(std::size_t input_length, std::size_t outputs = 1);

// Output shape of every layer, in order. Throws ConfigError when the stack
// does not chain from {1, input_length} to {output_dim}.
std::vector<std::vector<std::size_t>> layer_output_shapes(const NetworkConfig& config);
void validate(const NetworkConfig& config);

struct AdamSettings {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  friend bool operator==(const AdamSettings&, const AdamSettings&) = default;
};

struct Parameter {
  Tensor value;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
};

// Trainable tensors in layer order; Conv1D and Dense own a weight tensor
// followed by a bias tensor.
struct ModelState {
  std::vector<Parameter> params;
  AdamSettings adam;
  std::uint64_t step = 0;

  std::size_t parameter_count() const;
};

// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases.
ModelState initialize_model(const NetworkConfig& config, std::uint64_t seed,
                            AdamSettings adam = {});

// Parameter index of the weight tensor owned by each layer, or -1.
std::vector<std::ptrdiff_t> layer_parameter_index(const NetworkConfig& config);

using Gradients = std::vector<Tensor>;
Gradients zero_gradients(const ModelState& state);

enum class Mode { train, infer };

// Per-layer record needed by the backward pass.
struct ForwardTrace {
  std::vector<Tensor> layer_inputs;
  std::vector<std::vector<std::size_t>> pool_argmax;
  std::vector<std::vector<double>> dropout_masks;
};

// `input` is {input_length} or {1, input_length}. In infer mode `rng` is
// unused and may be null.
Tensor forward(const NetworkConfig& config, const ModelState& state, const Tensor& input,
               Mode mode, RandomStream* rng, ForwardTrace* trace = nullptr);

inline Tensor predict(const NetworkConfig& config, const ModelState& state, const Tensor& input) {
  return forward(config, state, input, Mode::infer, nullptr);
}

struct BatchGradient {
  Gradients gradients;
  double loss = 0.0;  // batch MSE
};

// d(batch MSE)/d(theta). In train mode sample b of the batch draws its
// dropout masks from derive_seed(dropout_seed, b).
BatchGradient backward(const NetworkConfig& config, const ModelState& state,
                       std::span<const Tensor> inputs, std::span<const Tensor> targets,
                       Mode mode = Mode::infer, std::uint64_t dropout_seed = 0);

// Bias-corrected Adam update; increments state.step.
void adam_step(ModelState& state, const Gradients& gradients);

}  // namespace roughcalib::nn

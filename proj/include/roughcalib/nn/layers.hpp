#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "roughcalib/nn/tensor.hpp"
#include "roughcalib/random.hpp"

namespace roughcalib::nn {

struct Conv1DSpec {
  std::size_t filters = 1;
  std::size_t kernel_size = 1;
  bool same_padding = true;
  friend bool operator==(const Conv1DSpec&, const Conv1DSpec&) = default;
};

struct LeakyReLUSpec {
  double slope = 0.1;
  friend bool operator==(const LeakyReLUSpec&, const LeakyReLUSpec&) = default;
};

struct MaxPool1DSpec {
  std::size_t pool_size = 3;
  std::size_t stride = 3;
  bool same_padding = true;
  friend bool operator==(const MaxPool1DSpec&, const MaxPool1DSpec&) = default;
};

struct DropoutSpec {
  double rate = 0.0;
  friend bool operator==(const DropoutSpec&, const DropoutSpec&) = default;
};

struct FlattenSpec {
  friend bool operator==(const FlattenSpec&, const FlattenSpec&) = default;
};

struct DenseSpec {
  std::size_t units = 1;
  friend bool operator==(const DenseSpec&, const DenseSpec&) = default;
};

using LayerSpec =
    std::variant<Conv1DSpec, LeakyReLUSpec, MaxPool1DSpec, DropoutSpec, FlattenSpec, DenseSpec>;

std::string layer_name(const LayerSpec& spec);
void validate(const LayerSpec& spec);

// Zero padding placed left and right of a length-L signal so that a
// stride-1 window of size k yields L outputs. Odd remainder goes right.
struct Padding {
  std::size_t left = 0;
  std::size_t right = 0;
};
Padding same_padding(std::size_t kernel_size);

// Extends every channel of a {C, L} map with zeros.
Tensor zero_pad(const Tensor& input, Padding pad);

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel_size, bool same_padding);
std::size_t maxpool1d_output_length(std::size_t length, std::size_t pool_size, std::size_t stride,
                                    bool same_padding);

// Sliding dot product (cross-correlation) summed over input channels.
// kernels: {C_out, C_in, k}; bias: empty or C_out values.
Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, std::span<const double> bias,
                      bool same_padding);
inline Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, bool same_padding) {
  return conv1d_forward(input, kernels, {}, same_padding);
}

Tensor leaky_relu(const Tensor& x, double slope);

struct PoolResult {
  Tensor output;
  // Flat input index that produced each output entry.
  std::vector<std::size_t> argmax;
};
// Windows start at 0, stride, 2*stride, ...; with same padding the last
// partial window is kept and the padding never wins the max.
PoolResult maxpool1d(const Tensor& input, std::size_t pool_size, std::size_t stride,
                     bool same_padding);

struct DropoutResult {
  Tensor output;
  std::vector<double> mask;  // 0 or 1 per entry
};
// Inverted dropout: survivors scaled by 1/(1-rate) in training, identity at inference.
DropoutResult dropout(const Tensor& input, double rate, RandomStream& rng, bool training);
Tensor apply_dropout_mask(const Tensor& input, std::span<const double> mask, double rate);

// A * x + b with A stored row-major {out, in}.
Tensor dense_forward(const Tensor& input, const Tensor& weights, std::span<const double> bias);

double mse_loss(const Tensor& pred, const Tensor& target);
double mse_loss(std::span<const Tensor> preds, std::span<const Tensor> targets);

}  // namespace roughcalib::nn

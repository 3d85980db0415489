#pragma once

// Reverse-mode counterparts of the layer primitives. Parameter gradients are
// accumulated into the supplied buffers; the returned tensor is the gradient
// with respect to the layer input (empty when not requested).

#include <span>
#include <vector>

#include "roughcalib/nn/tensor.hpp"

namespace roughcalib::nn {

Tensor conv1d_backward(const Tensor& input, const Tensor& kernels, bool same_padding,
                       const Tensor& grad_out, Tensor& grad_kernels, std::span<double> grad_bias,
                       bool want_input_grad);

Tensor leaky_relu_backward(const Tensor& input, double slope, const Tensor& grad_out);

Tensor maxpool1d_backward(const std::vector<std::size_t>& input_shape,
                          std::span<const std::size_t> argmax, const Tensor& grad_out);

Tensor dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                      Tensor& grad_weights, std::span<double> grad_bias, bool want_input_grad);

}  // namespace roughcalib::nn

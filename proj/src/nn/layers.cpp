#include "roughcalib/nn/layers.hpp"

#include <algorithm>
#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "roughcalib/error.hpp"
#include "roughcalib/nn/layer_grads.hpp"

namespace roughcalib::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_feature_map(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw ConfigError(std::string(op) + ": expected a {channels, length} input");
}

// Column matrix {C_in * k, L_out}: row (c, j), column p holds padded[c][p + j].
RowMatrix im2col(const Tensor& input, std::size_t k, Padding pad) {
  const std::size_t channels = input.dim(0);
  const std::size_t length = input.dim(1);
  const std::size_t padded = length + pad.left + pad.right;
  const std::size_t out_len = padded + 1 - k;
  RowMatrix cols = RowMatrix::Zero(static_cast<Eigen::Index>(channels * k),
                                   static_cast<Eigen::Index>(out_len));
  for (std::size_t c = 0; c < channels; ++c) {
    const double* src = input.data() + c * length;
    for (std::size_t j = 0; j < k; ++j) {
      double* row = cols.data() + (c * k + j) * out_len;
      // padded index p + j maps to source index p + j - left
      for (std::size_t p = 0; p < out_len; ++p) {
        const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(p + j) -
                                 static_cast<std::ptrdiff_t>(pad.left);
        if (s >= 0 && s < static_cast<std::ptrdiff_t>(length)) row[p] = src[s];
      }
    }
  }
  return cols;
}

}  // namespace

std::string layer_name(const LayerSpec& spec) {
  return std::visit(overloaded{
                        [](const Conv1DSpec&) { return std::string("conv1d"); },
                        [](const LeakyReLUSpec&) { return std::string("leaky_relu"); },
                        [](const MaxPool1DSpec&) { return std::string("max_pool1d"); },
                        [](const DropoutSpec&) { return std::string("dropout"); },
                        [](const FlattenSpec&) { return std::string("flatten"); },
                        [](const DenseSpec&) { return std::string("dense"); },
                    },
                    spec);
}

void validate(const LayerSpec& spec) {
  std::visit(overloaded{
                 [](const Conv1DSpec& s) {
                   if (s.filters < 1 || s.kernel_size < 1)
                     throw ConfigError("conv1d: filters and kernel size must be >= 1");
                 },
                 [](const LeakyReLUSpec& s) {
                   if (!(s.slope > 0.0 && s.slope < 1.0))
                     throw ConfigError("leaky_relu: slope must lie in (0, 1)");
                 },
                 [](const MaxPool1DSpec& s) {
                   if (s.pool_size < 1 || s.stride < 1)
                     throw ConfigError("max_pool1d: pool size and stride must be >= 1");
                 },
                 [](const DropoutSpec& s) {
                   if (!(s.rate >= 0.0 && s.rate < 1.0))
                     throw ConfigError("dropout: rate must lie in [0, 1)");
                 },
                 [](const FlattenSpec&) {},
                 [](const DenseSpec& s) {
                   if (s.units < 1) throw ConfigError("dense: units must be >= 1");
                 },
             },
             spec);
}

Padding same_padding(std::size_t kernel_size) {
  const std::size_t total = kernel_size - 1;
  return {total / 2, total - total / 2};
}

Tensor zero_pad(const Tensor& input, Padding pad) {
  require_feature_map(input, "zero_pad");
  const std::size_t channels = input.dim(0);
  const std::size_t length = input.dim(1);
  Tensor out({channels, length + pad.left + pad.right});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < length; ++i) out.at(c, i + pad.left) = input.at(c, i);
  }
  return out;
}

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel_size, bool same) {
  if (same) return length;
  if (kernel_size > length) throw ConfigError("conv1d: kernel longer than unpadded input");
  return length + 1 - kernel_size;
}

std::size_t maxpool1d_output_length(std::size_t length, std::size_t pool_size, std::size_t stride,
                                    bool same) {
  if (same) return (length + stride - 1) / stride;
  if (pool_size > length) throw ConfigError("max_pool1d: pool longer than unpadded input");
  return (length - pool_size) / stride + 1;
}

Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, std::span<const double> bias,
                      bool same) {
  require_feature_map(input, "conv1d");
  if (kernels.rank() != 3 || kernels.dim(1) != input.dim(0)) {
    throw ConfigError("conv1d: kernel input channels do not match input");
  }
  const std::size_t out_channels = kernels.dim(0);
  const std::size_t k = kernels.dim(2);
  if (!bias.empty() && bias.size() != out_channels) {
    throw ConfigError("conv1d: bias length does not match filter count");
  }
  const Padding pad = same ? same_padding(k) : Padding{};
  const std::size_t out_len = conv1d_output_length(input.dim(1), k, same);

  const RowMatrix cols = im2col(input, k, pad);
  Tensor out({out_channels, out_len});
  ConstMatrixMap w(kernels.data(), static_cast<Eigen::Index>(out_channels),
                   static_cast<Eigen::Index>(input.dim(0) * k));
  MatrixMap y(out.data(), static_cast<Eigen::Index>(out_channels),
              static_cast<Eigen::Index>(out_len));
  y.noalias() = w * cols;
  if (!bias.empty()) {
    for (std::size_t o = 0; o < out_channels; ++o) y.row(static_cast<Eigen::Index>(o)).array() += bias[o];
  }
  return out;
}

Tensor leaky_relu(const Tensor& x, double slope) {
  Tensor out = x;
  for (double& v : out.values()) {
    if (!(v > 0.0)) v *= slope;
  }
  return out;
}

PoolResult maxpool1d(const Tensor& input, std::size_t pool_size, std::size_t stride, bool same) {
  require_feature_map(input, "max_pool1d");
  if (pool_size < 1 || stride < 1) throw ConfigError("max_pool1d: pool size and stride must be >= 1");
  const std::size_t channels = input.dim(0);
  const std::size_t length = input.dim(1);
  const std::size_t out_len = maxpool1d_output_length(length, pool_size, stride, same);
  PoolResult result{Tensor({channels, out_len}), std::vector<std::size_t>(channels * out_len)};
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t o = 0; o < out_len; ++o) {
      const std::size_t begin = o * stride;
      const std::size_t end = std::min(begin + pool_size, length);
      std::size_t best = begin;
      for (std::size_t i = begin + 1; i < end; ++i) {
        if (input.at(c, i) > input.at(c, best)) best = i;
      }
      result.output.at(c, o) = input.at(c, best);
      result.argmax[c * out_len + o] = c * length + best;
    }
  }
  return result;
}

DropoutResult dropout(const Tensor& input, double rate, RandomStream& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout: rate must lie in [0, 1)");
  DropoutResult result{input, std::vector<double>(input.size(), 1.0)};
  if (!training || rate == 0.0) return result;
  for (double& m : result.mask) m = rng.uniform() < rate ? 0.0 : 1.0;
  result.output = apply_dropout_mask(input, result.mask, rate);
  return result;
}

Tensor apply_dropout_mask(const Tensor& input, std::span<const double> mask, double rate) {
  if (mask.size() != input.size()) throw ConfigError("dropout: mask size mismatch");
  Tensor out = input;
  const double scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mask[i] * scale * input[i];
  return out;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, std::span<const double> bias) {
  if (weights.rank() != 2 || weights.dim(1) != input.size()) {
    throw ConfigError("dense: input length does not match weight matrix");
  }
  const std::size_t units = weights.dim(0);
  if (bias.size() != units) throw ConfigError("dense: bias length does not match units");
  Tensor out({units});
  ConstMatrixMap a(weights.data(), static_cast<Eigen::Index>(units),
                   static_cast<Eigen::Index>(input.size()));
  ConstVectorMap x(input.data(), static_cast<Eigen::Index>(input.size()));
  ConstVectorMap b(bias.data(), static_cast<Eigen::Index>(units));
  VectorMap y(out.data(), static_cast<Eigen::Index>(units));
  y.noalias() = a * x;
  y += b;
  return out;
}

double mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) throw ConfigError("mse: shape mismatch");
  if (pred.size() == 0) throw ConfigError("mse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double mse_loss(std::span<const Tensor> preds, std::span<const Tensor> targets) {
  if (preds.size() != targets.size() || preds.empty()) throw ConfigError("mse: batch size mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t b = 0; b < preds.size(); ++b) {
    if (preds[b].shape() != targets[b].shape()) throw ConfigError("mse: shape mismatch");
    for (std::size_t i = 0; i < preds[b].size(); ++i) {
      const double d = preds[b][i] - targets[b][i];
      sum += d * d;
    }
    count += preds[b].size();
  }
  return sum / static_cast<double>(count);
}

// ---- gradients ----

Tensor conv1d_backward(const Tensor& input, const Tensor& kernels, bool same,
                       const Tensor& grad_out, Tensor& grad_kernels, std::span<double> grad_bias,
                       bool want_input_grad) {
  const std::size_t in_channels = input.dim(0);
  const std::size_t length = input.dim(1);
  const std::size_t out_channels = kernels.dim(0);
  const std::size_t k = kernels.dim(2);
  const Padding pad = same ? same_padding(k) : Padding{};
  const std::size_t out_len = grad_out.dim(1);
  const auto rows = static_cast<Eigen::Index>(in_channels * k);

  const RowMatrix cols = im2col(input, k, pad);
  ConstMatrixMap dy(grad_out.data(), static_cast<Eigen::Index>(out_channels),
                    static_cast<Eigen::Index>(out_len));
  MatrixMap dw(grad_kernels.data(), static_cast<Eigen::Index>(out_channels), rows);
  dw.noalias() += dy * cols.transpose();
  if (!grad_bias.empty()) {
    for (std::size_t o = 0; o < out_channels; ++o) grad_bias[o] += dy.row(static_cast<Eigen::Index>(o)).sum();
  }
  if (!want_input_grad) return {};

  ConstMatrixMap w(kernels.data(), static_cast<Eigen::Index>(out_channels), rows);
  const RowMatrix dcols = w.transpose() * dy;
  Tensor grad_in({in_channels, length});
  for (std::size_t c = 0; c < in_channels; ++c) {
    for (std::size_t j = 0; j < k; ++j) {
      const double* row = dcols.data() + (c * k + j) * out_len;
      for (std::size_t p = 0; p < out_len; ++p) {
        const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(p + j) -
                                 static_cast<std::ptrdiff_t>(pad.left);
        if (s >= 0 && s < static_cast<std::ptrdiff_t>(length)) grad_in.at(c, static_cast<std::size_t>(s)) += row[p];
      }
    }
  }
  return grad_in;
}

Tensor leaky_relu_backward(const Tensor& input, double slope, const Tensor& grad_out) {
  Tensor grad_in = grad_out;
  for (std::size_t i = 0; i < grad_in.size(); ++i) {
    if (!(input[i] > 0.0)) grad_in[i] *= slope;
  }
  return grad_in;
}

Tensor maxpool1d_backward(const std::vector<std::size_t>& input_shape,
                          std::span<const std::size_t> argmax, const Tensor& grad_out) {
  Tensor grad_in(input_shape);
  for (std::size_t o = 0; o < grad_out.size(); ++o) grad_in[argmax[o]] += grad_out[o];
  return grad_in;
}

Tensor dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                      Tensor& grad_weights, std::span<double> grad_bias, bool want_input_grad) {
  const auto units = static_cast<Eigen::Index>(weights.dim(0));
  const auto fan_in = static_cast<Eigen::Index>(weights.dim(1));
  ConstVectorMap x(input.data(), fan_in);
  ConstVectorMap dy(grad_out.data(), units);
  MatrixMap dw(grad_weights.data(), units, fan_in);
  dw.noalias() += dy * x.transpose();
  VectorMap(grad_bias.data(), units) += dy;
  if (!want_input_grad) return {};
  Tensor grad_in(input.shape());
  ConstMatrixMap a(weights.data(), units, fan_in);
  VectorMap(grad_in.data(), fan_in).noalias() = a.transpose() * dy;
  return grad_in;
}

}  // namespace roughcalib::nn

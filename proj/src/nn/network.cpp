#include "roughcalib/nn/network.hpp"

#include <cmath>
#include <type_traits>

#include "roughcalib/error.hpp"
#include "roughcalib/nn/layer_grads.hpp"

namespace roughcalib::nn {

namespace {

using Shape = std::vector<std::size_t>;

Tensor as_feature_map(const Tensor& input, std::size_t length) {
  if (input.size() != length) {
    throw ConfigError("network input has length " + std::to_string(input.size()) +
                      ", expected " + std::to_string(length));
  }
  Tensor x = input;
  x.reshape({1, length});
  return x;
}

}  // namespace

std::size_t NetworkConfig::output_dim() const {
  if (layers.empty()) throw ConfigError("network has no layers");
  const auto* dense = std::get_if<DenseSpec>(&layers.back());
  if (dense == nullptr) throw ConfigError("final layer must be dense");
  return dense->units;
}

NetworkConfig hurst_cnn_config(std::size_t input_length, std::size_t outputs) {
  NetworkConfig config;
  config.input_length = input_length;
  const std::size_t filters[] = {32, 64, 128};
  const double rates[] = {0.25, 0.25, 0.4};
  for (int block = 0; block < 3; ++block) {
    config.layers.emplace_back(Conv1DSpec{filters[block], 20, true});
    config.layers.emplace_back(LeakyReLUSpec{0.1});
    config.layers.emplace_back(MaxPool1DSpec{3, 3, true});
    config.layers.emplace_back(DropoutSpec{rates[block]});
  }
  config.layers.emplace_back(FlattenSpec{});
  config.layers.emplace_back(DenseSpec{128});
  config.layers.emplace_back(LeakyReLUSpec{0.1});
  config.layers.emplace_back(DropoutSpec{0.3});
  config.layers.emplace_back(DenseSpec{outputs});
  return config;
}

std::vector<Shape> layer_output_shapes(const NetworkConfig& config) {
  if (config.input_length < 1) throw ConfigError("input length must be >= 1");
  if (config.layers.empty()) throw ConfigError("network has no layers");
  std::vector<Shape> shapes;
  Shape shape{1, config.input_length};
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    const LayerSpec& layer = config.layers[i];
    validate(layer);
    const std::string where = "layer " + std::to_string(i) + " (" + layer_name(layer) + ")";
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Conv1DSpec>) {
            if (shape.size() != 2) throw ConfigError(where + ": needs a feature-map input");
            shape = {s.filters, conv1d_output_length(shape[1], s.kernel_size, s.same_padding)};
          } else if constexpr (std::is_same_v<T, MaxPool1DSpec>) {
            if (shape.size() != 2) throw ConfigError(where + ": needs a feature-map input");
            shape = {shape[0],
                     maxpool1d_output_length(shape[1], s.pool_size, s.stride, s.same_padding)};
          } else if constexpr (std::is_same_v<T, FlattenSpec>) {
            shape = {shape_product(shape)};
          } else if constexpr (std::is_same_v<T, DenseSpec>) {
            if (shape.size() != 1) throw ConfigError(where + ": needs a flat input");
            shape = {s.units};
          }
        },
        layer);
    shapes.push_back(shape);
  }
  if (!std::holds_alternative<DenseSpec>(config.layers.back())) {
    throw ConfigError("final layer must be dense");
  }
  return shapes;
}

void validate(const NetworkConfig& config) { (void)layer_output_shapes(config); }

std::size_t ModelState::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value.size();
  return n;
}

std::vector<std::ptrdiff_t> layer_parameter_index(const NetworkConfig& config) {
  std::vector<std::ptrdiff_t> index;
  std::ptrdiff_t next = 0;
  for (const auto& layer : config.layers) {
    if (std::holds_alternative<Conv1DSpec>(layer) || std::holds_alternative<DenseSpec>(layer)) {
      index.push_back(next);
      next += 2;
    } else {
      index.push_back(-1);
    }
  }
  return index;
}

ModelState initialize_model(const NetworkConfig& config, std::uint64_t seed, AdamSettings adam) {
  const auto shapes = layer_output_shapes(config);
  ModelState state;
  state.adam = adam;
  Shape in_shape{1, config.input_length};
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    Shape weight_shape;
    double fan_in = 0.0, fan_out = 0.0;
    if (const auto* conv = std::get_if<Conv1DSpec>(&config.layers[i])) {
      weight_shape = {conv->filters, in_shape[0], conv->kernel_size};
      fan_in = static_cast<double>(in_shape[0] * conv->kernel_size);
      fan_out = static_cast<double>(conv->filters * conv->kernel_size);
    } else if (const auto* dense = std::get_if<DenseSpec>(&config.layers[i])) {
      weight_shape = {dense->units, in_shape[0]};
      fan_in = static_cast<double>(in_shape[0]);
      fan_out = static_cast<double>(dense->units);
    }
    if (!weight_shape.empty()) {
      RandomStream rng(derive_seed(seed, i));
      const double bound = std::sqrt(6.0 / (fan_in + fan_out));
      Tensor w(weight_shape);
      for (double& v : w.values()) v = bound * (2.0 * rng.uniform() - 1.0);
      Tensor b({weight_shape[0]});
      state.params.push_back({w, std::vector<double>(w.size()), std::vector<double>(w.size())});
      state.params.push_back({b, std::vector<double>(b.size()), std::vector<double>(b.size())});
    }
    in_shape = shapes[i];
  }
  return state;
}

Gradients zero_gradients(const ModelState& state) {
  Gradients g;
  g.reserve(state.params.size());
  for (const auto& p : state.params) g.emplace_back(p.value.shape());
  return g;
}

Tensor forward(const NetworkConfig& config, const ModelState& state, const Tensor& input,
               Mode mode, RandomStream* rng, ForwardTrace* trace) {
  const auto param_index = layer_parameter_index(config);
  if (trace != nullptr) {
    trace->layer_inputs.assign(config.layers.size(), Tensor{});
    trace->pool_argmax.assign(config.layers.size(), {});
    trace->dropout_masks.assign(config.layers.size(), {});
  }
  const bool training = mode == Mode::train;
  Tensor x = as_feature_map(input, config.input_length);
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    if (trace != nullptr) trace->layer_inputs[i] = x;
    const std::ptrdiff_t pi = param_index[i];
    x = std::visit(
        [&](const auto& s) -> Tensor {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Conv1DSpec>) {
            const auto& w = state.params.at(static_cast<std::size_t>(pi)).value;
            const auto& b = state.params.at(static_cast<std::size_t>(pi) + 1).value;
            return conv1d_forward(x, w, b.values(), s.same_padding);
          } else if constexpr (std::is_same_v<T, LeakyReLUSpec>) {
            return leaky_relu(x, s.slope);
          } else if constexpr (std::is_same_v<T, MaxPool1DSpec>) {
            auto pooled = maxpool1d(x, s.pool_size, s.stride, s.same_padding);
            if (trace != nullptr) trace->pool_argmax[i] = std::move(pooled.argmax);
            return std::move(pooled.output);
          } else if constexpr (std::is_same_v<T, DropoutSpec>) {
            if (!training || s.rate == 0.0) return x;
            if (rng == nullptr) throw ConfigError("train-mode forward needs a random stream");
            auto dropped = dropout(x, s.rate, *rng, true);
            if (trace != nullptr) trace->dropout_masks[i] = std::move(dropped.mask);
            return std::move(dropped.output);
          } else if constexpr (std::is_same_v<T, FlattenSpec>) {
            Tensor flat = x;
            flat.reshape({x.size()});
            return flat;
          } else {
            const auto& w = state.params.at(static_cast<std::size_t>(pi)).value;
            const auto& b = state.params.at(static_cast<std::size_t>(pi) + 1).value;
            return dense_forward(x, w, b.values());
          }
        },
        config.layers[i]);
  }
  return x;
}

BatchGradient backward(const NetworkConfig& config, const ModelState& state,
                       std::span<const Tensor> inputs, std::span<const Tensor> targets, Mode mode,
                       std::uint64_t dropout_seed) {
  if (inputs.empty()) throw ConfigError("backward: empty batch");
  if (inputs.size() != targets.size()) throw ConfigError("backward: inputs/targets size mismatch");
  const auto param_index = layer_parameter_index(config);
  const std::size_t out_dim = config.output_dim();
  const double scale = 2.0 / static_cast<double>(inputs.size() * out_dim);

  BatchGradient result{zero_gradients(state), 0.0};
  ForwardTrace trace;
  for (std::size_t b = 0; b < inputs.size(); ++b) {
    RandomStream rng(derive_seed(dropout_seed, b));
    const Tensor pred = forward(config, state, inputs[b], mode, &rng, &trace);
    if (targets[b].size() != out_dim) throw ConfigError("backward: target dimension mismatch");

    Tensor grad(pred.shape());
    for (std::size_t j = 0; j < out_dim; ++j) {
      const double d = pred[j] - targets[b][j];
      result.loss += d * d;
      grad[j] = scale * d;
    }

    for (std::size_t i = config.layers.size(); i-- > 0;) {
      const Tensor& in = trace.layer_inputs[i];
      const bool need_input = i > 0;
      const std::ptrdiff_t pi = param_index[i];
      grad = std::visit(
          [&](const auto& s) -> Tensor {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Conv1DSpec>) {
              const auto w_index = static_cast<std::size_t>(pi);
              return conv1d_backward(in, state.params[w_index].value, s.same_padding, grad,
                                     result.gradients[w_index],
                                     result.gradients[w_index + 1].values(), need_input);
            } else if constexpr (std::is_same_v<T, LeakyReLUSpec>) {
              return leaky_relu_backward(in, s.slope, grad);
            } else if constexpr (std::is_same_v<T, MaxPool1DSpec>) {
              return maxpool1d_backward(in.shape(), trace.pool_argmax[i], grad);
            } else if constexpr (std::is_same_v<T, DropoutSpec>) {
              if (trace.dropout_masks[i].empty()) return grad;
              return apply_dropout_mask(grad, trace.dropout_masks[i], s.rate);
            } else if constexpr (std::is_same_v<T, FlattenSpec>) {
              Tensor g = grad;
              g.reshape(in.shape());
              return g;
            } else {
              const auto w_index = static_cast<std::size_t>(pi);
              return dense_backward(in, state.params[w_index].value, grad,
                                    result.gradients[w_index],
                                    result.gradients[w_index + 1].values(), need_input);
            }
          },
          config.layers[i]);
    }
  }
  result.loss /= static_cast<double>(inputs.size() * out_dim);
  return result;
}

void adam_step(ModelState& state, const Gradients& gradients) {
  if (gradients.size() != state.params.size()) throw ConfigError("adam: gradient count mismatch");
  const AdamSettings& a = state.adam;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(a.beta1, t);
  const double correction2 = 1.0 - std::pow(a.beta2, t);
  for (std::size_t p = 0; p < state.params.size(); ++p) {
    Parameter& param = state.params[p];
    const Tensor& g = gradients[p];
    if (g.size() != param.value.size()) throw ConfigError("adam: gradient shape mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) {
      double& m = param.first_moment[i];
      double& v = param.second_moment[i];
      m = a.beta1 * m + (1.0 - a.beta1) * g[i];
      v = a.beta2 * v + (1.0 - a.beta2) * g[i] * g[i];
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      param.value[i] -= a.learning_rate * m_hat / (std::sqrt(v_hat) + a.epsilon);
    }
  }
}

}  // namespace roughcalib::nn

#include "roughcalib/nn/gradcheck.hpp"

#include <cmath>

#include "roughcalib/error.hpp"

namespace roughcalib::nn {

namespace {

double batch_loss(const NetworkConfig& config, const ModelState& state,
                  const std::vector<Tensor>& inputs, const std::vector<Tensor>& targets) {
  std::vector<Tensor> preds;
  preds.reserve(inputs.size());
  for (const auto& x : inputs) preds.push_back(predict(config, state, x));
  return mse_loss(std::span<const Tensor>(preds), std::span<const Tensor>(targets));
}

}  // namespace

GradientCheck check_gradients(const NetworkConfig& config, const ModelState& state,
                              const std::vector<Tensor>& inputs, const std::vector<Tensor>& targets,
                              double step, double floor) {
  const BatchGradient analytic = backward(config, state, inputs, targets, Mode::infer);
  ModelState probe = state;
  GradientCheck result;
  std::size_t flat = 0;
  for (std::size_t p = 0; p < probe.params.size(); ++p) {
    for (std::size_t i = 0; i < probe.params[p].value.size(); ++i, ++flat) {
      double& theta = probe.params[p].value[i];
      const double saved = theta;
      theta = saved + step;
      const double up = batch_loss(config, probe, inputs, targets);
      theta = saved - step;
      const double down = batch_loss(config, probe, inputs, targets);
      theta = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double exact = analytic.gradients[p][i];
      const double err =
          std::abs(exact - numeric) / std::max(std::abs(exact) + std::abs(numeric), floor);
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = flat;
      }
    }
  }
  result.parameters = flat;
  return result;
}

NetworkConfig random_small_config(std::uint64_t seed, std::size_t max_parameters) {
  RandomStream rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    NetworkConfig config;
    config.input_length = 8 + static_cast<std::size_t>(rng.below(17));
    const std::size_t blocks = 1 + static_cast<std::size_t>(rng.below(2));
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t filters = 2 + static_cast<std::size_t>(rng.below(3));
      const std::size_t kernel = 1 + static_cast<std::size_t>(rng.below(5));
      config.layers.emplace_back(Conv1DSpec{filters, kernel, rng.below(4) != 0});
      config.layers.emplace_back(LeakyReLUSpec{0.05 + 0.3 * rng.uniform()});
      const std::size_t pool = 1 + static_cast<std::size_t>(rng.below(3));
      config.layers.emplace_back(MaxPool1DSpec{pool, pool, true});
      config.layers.emplace_back(DropoutSpec{0.0});
    }
    config.layers.emplace_back(FlattenSpec{});
    config.layers.emplace_back(DenseSpec{2 + static_cast<std::size_t>(rng.below(6))});
    config.layers.emplace_back(LeakyReLUSpec{0.1});
    config.layers.emplace_back(DenseSpec{1 + static_cast<std::size_t>(rng.below(2))});
    try {
      const ModelState probe = initialize_model(config, 0);
      if (probe.parameter_count() <= max_parameters) return config;
    } catch (const ConfigError&) {
      // kernel longer than a valid-padded input; draw again
    }
  }
  throw ConfigError("could not draw a network under the parameter budget");
}

}  // namespace roughcalib::nn

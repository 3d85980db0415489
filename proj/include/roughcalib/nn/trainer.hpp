#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roughcalib/nn/network.hpp"

namespace roughcalib::nn {

struct SampleSet {
  std::vector<Tensor> inputs;
  std::vector<Tensor> targets;

  std::size_t size() const noexcept { return inputs.size(); }
  bool empty() const noexcept { return inputs.empty(); }
};

struct TrainOptions {
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  AdamSettings adam{};
  // Train on per-output standardized targets; the inverse affine map is
  // folded into the output layer once training ends.
  bool standardize_targets = false;
};

struct TrainReport {
  std::vector<double> train_mse;       // mean batch loss per epoch, train mode
  std::vector<double> validation_mse;  // infer mode, after each epoch
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  double test_rmse = 0.0;  // NaN when no test set was supplied
};

struct TrainResult {
  ModelState state;
  TrainReport report;
};

// Mini-batch Adam on MSE. Epoch e shuffles the training indices with
// derive_seed(seed, e); the result is a pure function of the arguments
// (timing fields aside).
TrainResult train(const NetworkConfig& config, const SampleSet& training,
                  const SampleSet& validation, const SampleSet& test, const TrainOptions& options);

// Same loop starting from an existing state (lr, Adam moments and step are kept).
TrainReport train_from(const NetworkConfig& config, ModelState& state, const SampleSet& training,
                       const SampleSet& validation, const SampleSet& test,
                       const TrainOptions& options);

std::vector<Tensor> predict_all(const NetworkConfig& config, const ModelState& state,
                                const std::vector<Tensor>& inputs);

// Root of the MSE taken over every output component of every sample.
double rmse(const std::vector<Tensor>& predictions, const std::vector<Tensor>& targets);

}  // namespace roughcalib::nn

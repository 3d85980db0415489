#include "roughcalib/nn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "roughcalib/error.hpp"

namespace roughcalib::nn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer identity(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
  }

  static Standardizer fit(const std::vector<Tensor>& targets, std::size_t dim) {
    Standardizer s = identity(dim);
    const auto n = static_cast<double>(targets.size());
    for (std::size_t j = 0; j < dim; ++j) {
      double sum = 0.0, sq = 0.0;
      for (const auto& t : targets) sum += t[j];
      s.mean[j] = sum / n;
      for (const auto& t : targets) sq += (t[j] - s.mean[j]) * (t[j] - s.mean[j]);
      const double sd = std::sqrt(sq / n);
      s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
  }

  Tensor apply(const Tensor& t) const {
    Tensor out = t;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = (t[j] - mean[j]) / scale[j];
    return out;
  }

  // Output layer computes z = W x + b in standardized units; rewrite it to
  // produce scale * z + mean directly.
  void fold_into(ModelState& state) const {
    Tensor& w = state.params[state.params.size() - 2].value;
    Tensor& b = state.params[state.params.size() - 1].value;
    const std::size_t fan_in = w.dim(1);
    for (std::size_t j = 0; j < b.size(); ++j) {
      for (std::size_t i = 0; i < fan_in; ++i) w[j * fan_in + i] *= scale[j];
      b[j] = scale[j] * b[j] + mean[j];
    }
  }
};

void check_set(const SampleSet& set, const NetworkConfig& config, const char* name) {
  if (set.inputs.size() != set.targets.size()) {
    throw ConfigError(std::string(name) + " set: inputs/targets size mismatch");
  }
  for (const auto& t : set.targets) {
    if (t.size() != config.output_dim()) {
      throw ConfigError(std::string(name) + " set: target dimension does not match network output");
    }
  }
}

double evaluate_mse(const NetworkConfig& config, const ModelState& state, const SampleSet& set,
                    const Standardizer& standardizer) {
  if (set.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Tensor pred = predict(config, state, set.inputs[i]);
    const Tensor target = standardizer.apply(set.targets[i]);
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double d = pred[j] - target[j];
      sum += d * d;
    }
    count += pred.size();
  }
  return sum / static_cast<double>(count);
}

}  // namespace

TrainResult train(const NetworkConfig& config, const SampleSet& training,
                  const SampleSet& validation, const SampleSet& test, const TrainOptions& options) {
  TrainResult result{initialize_model(config, options.seed, options.adam), {}};
  result.report = train_from(config, result.state, training, validation, test, options);
  return result;
}

TrainReport train_from(const NetworkConfig& config, ModelState& state, const SampleSet& training,
                       const SampleSet& validation, const SampleSet& test,
                       const TrainOptions& options) {
  validate(config);
  if (training.empty()) throw ConfigError("training set is empty");
  if (options.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (options.batch_size < 1) throw ConfigError("batch size must be >= 1");
  check_set(training, config, "training");
  check_set(validation, config, "validation");
  check_set(test, config, "test");

  const std::size_t out_dim = config.output_dim();
  const Standardizer standardizer = options.standardize_targets
                                        ? Standardizer::fit(training.targets, out_dim)
                                        : Standardizer::identity(out_dim);
  std::vector<Tensor> scaled_targets;
  scaled_targets.reserve(training.size());
  for (const auto& t : training.targets) scaled_targets.push_back(standardizer.apply(t));

  TrainReport report;
  const auto train_start = Clock::now();
  std::vector<std::size_t> order(training.size());
  std::vector<Tensor> batch_inputs, batch_targets;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RandomStream shuffler(derive_seed(options.seed, 0x5348554646ULL, epoch));
    shuffler.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += options.batch_size) {
      const std::size_t end = std::min(begin + options.batch_size, order.size());
      batch_inputs.clear();
      batch_targets.clear();
      for (std::size_t k = begin; k < end; ++k) {
        batch_inputs.push_back(training.inputs[order[k]]);
        batch_targets.push_back(scaled_targets[order[k]]);
      }
      const std::uint64_t dropout_seed = derive_seed(options.seed, epoch + 1, batches + 1);
      const BatchGradient g =
          backward(config, state, batch_inputs, batch_targets, Mode::train, dropout_seed);
      adam_step(state, g.gradients);
      loss_sum += g.loss;
      ++batches;
    }
    report.train_mse.push_back(loss_sum / static_cast<double>(batches));
    report.validation_mse.push_back(evaluate_mse(config, state, validation, standardizer));
  }
  if (options.standardize_targets) standardizer.fold_into(state);
  report.train_seconds = seconds_since(train_start);

  const auto test_start = Clock::now();
  if (test.empty()) {
    report.test_rmse = std::numeric_limits<double>::quiet_NaN();
  } else {
    report.test_rmse = rmse(predict_all(config, state, test.inputs), test.targets);
  }
  report.test_seconds = seconds_since(test_start);
  return report;
}

std::vector<Tensor> predict_all(const NetworkConfig& config, const ModelState& state,
                                const std::vector<Tensor>& inputs) {
  std::vector<Tensor> out;
  out.reserve(inputs.size());
  for (const auto& x : inputs) out.push_back(predict(config, state, x));
  return out;
}

double rmse(const std::vector<Tensor>& predictions, const std::vector<Tensor>& targets) {
  return std::sqrt(mse_loss(std::span<const Tensor>(predictions), std::span<const Tensor>(targets)));
}

}  // namespace roughcalib::nn

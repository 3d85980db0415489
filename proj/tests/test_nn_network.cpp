#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "roughcalib/error.hpp"
#include "roughcalib/nn/gradcheck.hpp"
#include "roughcalib/nn/model_io.hpp"
#include "roughcalib/nn/network.hpp"
#include "roughcalib/nn/trainer.hpp"

using namespace roughcalib;
using namespace roughcalib::nn;

namespace {

Tensor random_input(RandomStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return Tensor::vector(std::move(v));
}

NetworkConfig single_dense(std::size_t n, std::size_t units) {
  NetworkConfig c;
  c.input_length = n;
  c.layers = {FlattenSpec{}, DenseSpec{units}};
  return c;
}

}  // namespace

TEST_CASE("single identity dense layer returns its input") {
  const NetworkConfig config = single_dense(3, 3);
  ModelState state = initialize_model(config, 1);
  state.params[0].value = Tensor({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  state.params[1].value = Tensor({3});
  const Tensor x = Tensor::vector({0.5, -1.0, 2.0});
  const Tensor y = predict(config, state, x);
  for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("Hurst CNN architecture maps length 100 to one output") {
  const NetworkConfig config = hurst_cnn_config(100);
  const auto shapes = layer_output_shapes(config);
  CHECK(shapes[2] == std::vector<std::size_t>{32, 34});
  CHECK(shapes[6] == std::vector<std::size_t>{64, 12});
  CHECK(shapes[10] == std::vector<std::size_t>{128, 4});
  CHECK(shapes[12] == std::vector<std::size_t>{512});
  const ModelState state = initialize_model(config, 11);
  RandomStream rng(5);
  const Tensor x = random_input(rng, 100);
  const Tensor y1 = predict(config, state, x);
  const Tensor y2 = predict(config, state, x);
  CHECK(y1.size() == 1);
  CHECK(y1 == y2);
  CHECK(hurst_cnn_config(100, 2).output_dim() == 2);
}

TEST_CASE("configuration errors") {
  NetworkConfig no_dense;
  no_dense.input_length = 10;
  no_dense.layers = {Conv1DSpec{2, 3, true}};
  CHECK_THROWS_AS(validate(no_dense), ConfigError);

  NetworkConfig dense_on_map;
  dense_on_map.input_length = 10;
  dense_on_map.layers = {Conv1DSpec{2, 3, true}, DenseSpec{1}};
  CHECK_THROWS_AS(validate(dense_on_map), ConfigError);

  NetworkConfig bad_rate = single_dense(4, 1);
  bad_rate.layers.insert(bad_rate.layers.begin(), DropoutSpec{1.0});
  CHECK_THROWS_AS(validate(bad_rate), ConfigError);

  const NetworkConfig ok = single_dense(4, 1);
  const ModelState state = initialize_model(ok, 0);
  CHECK_THROWS_AS(predict(ok, state, Tensor::vector({1, 2, 3})), ConfigError);
}

TEST_CASE("zero-weight dense net: bias gradient is 2 * mean(pred - target)") {
  const NetworkConfig config = single_dense(4, 1);
  ModelState state = initialize_model(config, 0);
  for (auto& p : state.params) std::fill(p.value.values().begin(), p.value.values().end(), 0.0);
  const std::vector<Tensor> xs{Tensor::vector({1, 2, 3, 4}), Tensor::vector({0, 1, 0, 1})};
  const std::vector<Tensor> ys{Tensor::vector({0}), Tensor::vector({0})};
  const BatchGradient g = backward(config, state, xs, ys);
  CHECK(g.gradients[1][0] == 0.0);
  CHECK(g.loss == 0.0);

  state.params[1].value[0] = 0.75;
  const BatchGradient g2 = backward(config, state, xs, ys);
  CHECK(g2.gradients[1][0] == doctest::Approx(2.0 * 0.75));
}

TEST_CASE("duplicated sample gives the single-sample gradient") {
  const NetworkConfig config = random_small_config(99);
  const ModelState state = initialize_model(config, 4);
  RandomStream rng(8);
  const Tensor x = random_input(rng, config.input_length);
  const Tensor y = Tensor(std::vector<std::size_t>{config.output_dim()});
  const std::vector<Tensor> one_x{x}, one_y{y};
  const std::vector<Tensor> two_x{x, x}, two_y{y, y};
  const auto g1 = backward(config, state, one_x, one_y);
  const auto g2 = backward(config, state, two_x, two_y);
  for (std::size_t p = 0; p < g1.gradients.size(); ++p) {
    for (std::size_t i = 0; i < g1.gradients[p].size(); ++i) {
      CHECK(g2.gradients[p][i] == doctest::Approx(g1.gradients[p][i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("backprop matches central finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NetworkConfig config = random_small_config(seed);
    const ModelState state = initialize_model(config, seed + 100);
    REQUIRE(state.parameter_count() <= 1000);
    RandomStream rng(seed + 200);
    std::vector<Tensor> xs, ys;
    for (int b = 0; b < 3; ++b) {
      xs.push_back(random_input(rng, config.input_length));
      ys.push_back(random_input(rng, config.output_dim()));
    }
    const GradientCheck check = check_gradients(config, state, xs, ys);
    INFO("seed " << seed << " worst parameter " << check.worst_parameter);
    CHECK(check.max_relative_error <= 1e-4);
  }
}

TEST_CASE("adam: zero gradient leaves a fresh model unchanged") {
  const NetworkConfig config = single_dense(3, 2);
  ModelState state = initialize_model(config, 3);
  const ModelState before = state;
  adam_step(state, zero_gradients(state));
  CHECK(state.step == 1);
  for (std::size_t p = 0; p < state.params.size(); ++p) CHECK(state.params[p].value == before.params[p].value);
}

TEST_CASE("adam: first step moves by lr against the gradient sign") {
  const NetworkConfig config = single_dense(1, 1);
  ModelState state = initialize_model(config, 3);
  const double w0 = state.params[0].value[0];
  Gradients g = zero_gradients(state);
  g[0][0] = 0.37;
  g[1][0] = -5.0;
  adam_step(state, g);
  CHECK(state.params[0].value[0] - w0 == doctest::Approx(-1e-3).epsilon(1e-6));
  CHECK(state.params[1].value[0] == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("adam: equal gradients give equal updates") {
  const NetworkConfig config = single_dense(2, 1);
  ModelState state = initialize_model(config, 3);
  state.params[0].value[0] = 0.2;
  state.params[0].value[1] = 0.2;
  for (int s = 0; s < 5; ++s) {
    Gradients g = zero_gradients(state);
    g[0][0] = g[0][1] = 0.1 * (s + 1);
    adam_step(state, g);
  }
  CHECK(state.params[0].value[0] == state.params[0].value[1]);
}

TEST_CASE("save and load reproduce predictions bit for bit") {
  const NetworkConfig config = hurst_cnn_config(40, 2);
  const ModelState state = initialize_model(config, 77);
  std::stringstream buffer;
  save_model(buffer, config, state);
  const LoadedModel loaded = load_model(buffer);
  CHECK(loaded.config == config);
  RandomStream rng(1);
  for (int i = 0; i < 100; ++i) {
    const Tensor x = random_input(rng, 40);
    CHECK(predict(config, state, x) == predict(loaded.config, loaded.state, x));
  }
}

TEST_CASE("config text round trip") {
  const NetworkConfig config = hurst_cnn_config(100);
  CHECK(config_from_text(config_to_text(config)) == config);
}

TEST_CASE("truncated, unknown-layer and wrong-version files fail to load") {
  const NetworkConfig config = single_dense(5, 1);
  const ModelState state = initialize_model(config, 2);
  std::stringstream full;
  save_model(full, config, state);
  const std::string bytes = full.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_model(truncated), LoadError);

  std::stringstream header_only(bytes.substr(0, 20));
  CHECK_THROWS_AS(load_model(header_only), LoadError);

  std::string unknown = bytes;
  unknown.replace(unknown.find("layer flatten"), 13, "layer flattex");
  std::stringstream unknown_stream(unknown);
  CHECK_THROWS_WITH_AS(load_model(unknown_stream), doctest::Contains("unknown layer kind"), LoadError);

  std::string version = bytes;
  version.replace(version.find("roughcalib-model 1"), 18, "roughcalib-model 9");
  std::stringstream version_stream(version);
  CHECK_THROWS_WITH_AS(load_model(version_stream), doctest::Contains("version"), LoadError);

  std::stringstream empty;
  CHECK_THROWS_AS(load_model(empty), LoadError);
}

TEST_CASE("training with lr=0 keeps the initial parameters") {
  const NetworkConfig config = random_small_config(5);
  RandomStream rng(3);
  SampleSet train_set, val, test;
  for (int i = 0; i < 20; ++i) {
    train_set.inputs.push_back(random_input(rng, config.input_length));
    train_set.targets.push_back(random_input(rng, config.output_dim()));
  }
  TrainOptions opts;
  opts.epochs = 1;
  opts.batch_size = 8;
  opts.seed = 12;
  opts.adam.learning_rate = 0.0;
  const auto result = train(config, train_set, val, test, opts);
  const ModelState initial = initialize_model(config, 12);
  for (std::size_t p = 0; p < initial.params.size(); ++p) {
    CHECK(result.state.params[p].value == initial.params[p].value);
  }
  CHECK(result.report.train_mse.size() == 1);
  CHECK(std::isnan(result.report.validation_mse[0]));
}

TEST_CASE("training is reproducible and reduces the loss") {
  NetworkConfig config;
  config.input_length = 16;
  config.layers = {Conv1DSpec{4, 3, true}, LeakyReLUSpec{0.1}, MaxPool1DSpec{2, 2, true},
                   DropoutSpec{0.2}, FlattenSpec{}, DenseSpec{8}, LeakyReLUSpec{0.1}, DenseSpec{1}};
  RandomStream rng(4);
  SampleSet train_set, val, test;
  // Target: standard deviation of the signal scale.
  for (int i = 0; i < 200; ++i) {
    const double scale = 0.5 + rng.uniform();
    Tensor x = random_input(rng, 16);
    for (double& v : x.values()) v *= scale;
    SampleSet& dst = i < 140 ? train_set : (i < 170 ? val : test);
    dst.inputs.push_back(x);
    dst.targets.push_back(Tensor::vector({scale}));
  }
  TrainOptions opts;
  opts.epochs = 15;
  opts.batch_size = 16;
  opts.seed = 21;
  opts.adam.learning_rate = 1e-2;
  const auto a = train(config, train_set, val, test, opts);
  const auto b = train(config, train_set, val, test, opts);
  CHECK(a.report.train_mse == b.report.train_mse);
  CHECK(a.report.validation_mse == b.report.validation_mse);
  CHECK(a.report.test_rmse == b.report.test_rmse);
  CHECK(a.report.train_mse.back() < a.report.train_mse.front());
  for (double l : a.report.train_mse) CHECK(l >= 0.0);

  opts.standardize_targets = true;
  const auto s = train(config, train_set, val, test, opts);
  CHECK(std::isfinite(s.report.test_rmse));
  CHECK(s.report.test_rmse < 0.5);
}

TEST_CASE("empty training split is a configuration error") {
  const NetworkConfig config = single_dense(3, 1);
  SampleSet empty;
  CHECK_THROWS_AS(train(config, empty, empty, empty, TrainOptions{}), ConfigError);
}

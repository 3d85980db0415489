#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "roughcalib/error.hpp"
#include "roughcalib/harness/config.hpp"
#include "roughcalib/harness/experiments.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace roughcalib::harness;

  CLI::App app{"Estimate the Hurst parameter of rough volatility paths with a 1D CNN"};
  app.set_version_flag("--version", "roughcalib 1.0");

  std::string command;
  std::optional<std::string> config_file, out_dir, sampler, eta, model_file, data_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> input_length, epochs, batch_size;
  bool half_log = false;
  bool print_config = false;

  app.add_option("command", command, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_file, "INI-style configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed (required here or in the config)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--input-length", input_length, "Path length N0");
  app.add_option("--sampler", sampler, "H sampler")
      ->check(CLI::IsMember({"discrete", "uniform5", "beta5", "uniform", "beta"}));
  app.add_option("--eta", eta, "Fixed eta value, or 'random' for Uniform(0, 3)");
  app.add_option("--epochs", epochs, "Training epochs");
  app.add_option("--batch-size", batch_size, "Mini-batch size");
  app.add_flag("--half-log", half_log, "Feed 0.5 * log rv (log volatility) when calibrating");
  app.add_option("--model", model_file, "Saved model file");
  app.add_option("--data", data_file, "Dataset file (train/eval) or date,symbol,rv CSV (calibrate)");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  ExperimentConfig config;
  try {
    if (config_file) apply_config_file(config, *config_file);
    config.command = command_from_name(command);
    if (seed) config.seed = *seed;
    if (out_dir) set_option(config, "run.out", *out_dir);
    if (input_length) config.input_length = *input_length;
    if (sampler) set_option(config, "data.sampler", *sampler);
    if (eta) set_option(config, "data.eta", *eta);
    if (epochs) config.epochs = *epochs;
    if (batch_size) config.batch_size = *batch_size;
    if (half_log) config.half_log = true;
    if (model_file) set_option(config, "io.model", *model_file);
    if (data_file) set_option(config, "io.data", *data_file);
    if (print_config) {
      std::cout << describe(config);
      return 0;
    }
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "roughcalib: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    const auto outcome = run_experiment(config, std::cout);
    for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
    if (!outcome.passed) {
      std::cerr << "roughcalib: check failed\n";
      return kRuntimeError;
    }
  } catch (const std::exception& e) {
    std::cerr << "roughcalib: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}

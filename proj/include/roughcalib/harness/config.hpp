#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace roughcalib::harness {

enum class Command {
  gen_data,
  train,
  eval,
  robust_eta,
  robust_random,
  robust_fbm,
  learn_eta,
  robust_ou,
  calibrate,
  gradcheck,
};

std::string command_name(Command c);
Command command_from_name(const std::string& name);
const std::vector<std::string>& command_names();

struct ExperimentConfig {
  Command command = Command::train;
  std::optional<std::uint64_t> seed;  // required before running
  std::filesystem::path out_dir = "out";

  // [data]
  std::size_t input_length = 100;
  double horizon = 1.0;
  std::string sampler = "discrete";
  std::string eta = "1";  // number or "random"
  double eta_low = 0.0;
  double eta_high = 3.0;
  std::size_t paths_per_value = 1000;
  std::string model = "rbergomi";  // rbergomi | fbm
  bool drift = false;

  // [train]
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  bool standardize = false;

  // [ls]
  std::vector<double> q_grid{0.5, 1.0, 1.5, 2.0, 3.0};
  std::size_t max_lag = 10;

  // [robust]
  std::vector<double> eta_values{0.25, 0.8, 1.3, 2.5};
  std::vector<std::string> fbm_samplers{"discrete", "uniform5", "beta5"};
  std::vector<std::string> ou_samplers{"discrete", "uniform5"};
  std::vector<double> ou_c{3.0, 0.3};
  std::size_t ou_paths = 1000;
  double ou_x0 = 0.1;
  double ou_a = 1.0;
  double ou_b = 2.1;

  // [calibrate]
  std::size_t window = 100;
  std::size_t window_total = 200;
  std::size_t window_stride = 10;
  bool half_log = false;

  // [gradcheck]
  std::size_t gradcheck_networks = 10;
  double gradcheck_tolerance = 1e-4;

  // [io]
  std::optional<std::filesystem::path> model_file;
  std::optional<std::filesystem::path> data_file;

  std::size_t total_paths() const { return 5 * paths_per_value; }
  void validate() const;
};

// Applies `section.key = value`; throws ConfigError naming the key when it
// is unknown or the value does not parse.
void set_option(ExperimentConfig& config, const std::string& key, const std::string& value);

// `[section]` headers and `key = value` lines; '#' and ';' start comments.
void apply_config_text(ExperimentConfig& config, std::istream& in);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& file);

// Every key with its current value, in `section.key = value` form.
std::string describe(const ExperimentConfig& config);

}  // namespace roughcalib::harness

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "roughcalib/data/dataset.hpp"
#include "roughcalib/nn/network.hpp"
#include "roughcalib/nn/trainer.hpp"
#include "roughcalib/paths/path.hpp"

namespace roughcalib::est {

struct LsConfig {
  std::vector<double> q_grid{0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<std::size_t> lag_grid{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double dt = 0.01;  // physical time of one grid step

  void validate(std::size_t path_length) const;
  static LsConfig for_grid(const paths::GridSpec& grid) {
    LsConfig c;
    c.dt = grid.dt();
    return c;
  }
};

struct HEstimate {
  double h = 0.0;
  std::optional<double> eta;
};

// m[q][lag] = mean_i |x_{i+lag} - x_i|^q.
std::vector<std::vector<double>> ls_moments(std::span<const double> path, const LsConfig& config);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least squares; without an intercept the slope is sum(xy) / sum(x^2).
LineFit ols(std::span<const double> x, std::span<const double> y, bool with_intercept = true);

// Regress log m(q, lag) on log(lag * dt) for each q, then zeta_q on q through
// the origin. eta is exp(intercept_{q=2} / 2) when q = 2 is on the grid.
HEstimate ls_estimate_h(std::span<const double> path, const LsConfig& config);
HEstimate ls_estimate_from_moments(const std::vector<std::vector<double>>& moments,
                                   const LsConfig& config);

HEstimate cnn_estimate_h(const nn::NetworkConfig& config, const nn::ModelState& state,
                         std::span<const double> path);

double rmse(std::span<const double> estimates, std::span<const double> truths);

// Mean and (population) variance of estimate - truth.
struct ErrorStats {
  double rmse = 0.0;
  double mean_difference = 0.0;
  double std_difference = 0.0;
};
ErrorStats error_stats(std::span<const double> estimates, std::span<const double> truths);

// Dataset rows restricted to `indices` as network samples; input tensors are
// {n}, target tensors have the label dimension.
nn::SampleSet to_sample_set(const data::LabeledDataset& dataset,
                            const std::vector<std::size_t>& indices);

}  // namespace roughcalib::est

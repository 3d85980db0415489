#include "roughcalib/est/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roughcalib/error.hpp"

namespace roughcalib::est {

void LsConfig::validate(std::size_t path_length) const {
  if (q_grid.empty() || lag_grid.empty()) throw ConfigError("LS q and lag grids must be nonempty");
  if (!std::is_sorted(q_grid.begin(), q_grid.end()) ||
      std::adjacent_find(q_grid.begin(), q_grid.end()) != q_grid.end() || q_grid.front() <= 0.0) {
    throw ConfigError("LS q grid must be positive and strictly increasing");
  }
  if (!std::is_sorted(lag_grid.begin(), lag_grid.end()) ||
      std::adjacent_find(lag_grid.begin(), lag_grid.end()) != lag_grid.end() || lag_grid.front() == 0) {
    throw ConfigError("LS lag grid must be positive and strictly increasing");
  }
  if (lag_grid.size() < 2) throw ConfigError("LS regression needs at least two lags");
  if (lag_grid.back() >= path_length) {
    throw ConfigError("largest LS lag (" + std::to_string(lag_grid.back()) +
                      ") must be below the path length (" + std::to_string(path_length) + ")");
  }
  if (!(dt > 0.0)) throw ConfigError("LS dt must be positive");
}

std::vector<std::vector<double>> ls_moments(std::span<const double> path, const LsConfig& config) {
  config.validate(path.size());
  std::vector<std::vector<double>> m(config.q_grid.size(), std::vector<double>(config.lag_grid.size()));
  std::vector<double> increments;
  for (std::size_t l = 0; l < config.lag_grid.size(); ++l) {
    const std::size_t lag = config.lag_grid[l];
    increments.resize(path.size() - lag);
    for (std::size_t i = 0; i + lag < path.size(); ++i) increments[i] = std::abs(path[i + lag] - path[i]);
    for (std::size_t k = 0; k < config.q_grid.size(); ++k) {
      const double q = config.q_grid[k];
      double sum = 0.0;
      for (double d : increments) sum += std::pow(d, q);
      m[k][l] = sum / static_cast<double>(increments.size());
    }
  }
  return m;
}

LineFit ols(std::span<const double> x, std::span<const double> y, bool with_intercept) {
  if (x.size() != y.size()) throw ConfigError("ols: x and y lengths differ");
  if (x.size() < 2) throw DegenerateInputError("ols needs at least two points");
  const double n = static_cast<double>(x.size());
  if (!with_intercept) {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += x[i] * y[i];
      sxx += x[i] * x[i];
    }
    if (sxx == 0.0) throw DegenerateInputError("ols: all x are zero");
    return {sxy / sxx, 0.0};
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateInputError("ols: all x are equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

HEstimate ls_estimate_from_moments(const std::vector<std::vector<double>>& moments,
                                   const LsConfig& config) {
  std::vector<double> log_lag;
  for (std::size_t lag : config.lag_grid) log_lag.push_back(std::log(static_cast<double>(lag) * config.dt));
  std::vector<double> zeta;
  HEstimate out;
  std::vector<double> log_m(log_lag.size());
  for (std::size_t k = 0; k < config.q_grid.size(); ++k) {
    for (std::size_t l = 0; l < log_lag.size(); ++l) {
      const double m = moments.at(k).at(l);
      if (!(m > 0.0) || !std::isfinite(m)) {
        throw DegenerateInputError("LS moment is zero or non-finite (constant path segment)");
      }
      log_m[l] = std::log(m);
    }
    const LineFit fit = ols(log_lag, log_m, true);
    zeta.push_back(fit.slope);
    if (config.q_grid[k] == 2.0) out.eta = std::exp(fit.intercept / 2.0);
  }
  out.h = ols(config.q_grid, zeta, false).slope;
  return out;
}

HEstimate ls_estimate_h(std::span<const double> path, const LsConfig& config) {
  return ls_estimate_from_moments(ls_moments(path, config), config);
}

HEstimate cnn_estimate_h(const nn::NetworkConfig& config, const nn::ModelState& state,
                         std::span<const double> path) {
  if (path.size() != config.input_length) {
    throw ConfigError("path length " + std::to_string(path.size()) +
                      " does not match the model input length N0 = " +
                      std::to_string(config.input_length));
  }
  const nn::Tensor out =
      nn::predict(config, state, nn::Tensor::vector(std::vector<double>(path.begin(), path.end())));
  HEstimate e;
  e.h = out[0];
  if (out.size() > 1) e.eta = out[1];
  return e;
}

double rmse(std::span<const double> estimates, std::span<const double> truths) {
  return error_stats(estimates, truths).rmse;
}

ErrorStats error_stats(std::span<const double> estimates, std::span<const double> truths) {
  if (estimates.size() != truths.size()) throw ConfigError("rmse: length mismatch");
  if (estimates.empty()) throw ConfigError("rmse: empty input");
  const double n = static_cast<double>(estimates.size());
  double sq = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truths[i];
    sq += d * d;
    mean += d;
  }
  mean /= n;
  double var = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truths[i] - mean;
    var += d * d;
  }
  return {std::sqrt(sq / n), mean, std::sqrt(var / n)};
}

nn::SampleSet to_sample_set(const data::LabeledDataset& dataset,
                            const std::vector<std::size_t>& indices) {
  nn::SampleSet set;
  set.inputs.reserve(indices.size());
  set.targets.reserve(indices.size());
  for (std::size_t i : indices) {
    set.inputs.push_back(nn::Tensor::vector(dataset.inputs.at(i).values));
    set.targets.push_back(nn::Tensor::vector(dataset.targets.at(i)));
  }
  return set;
}

}  // namespace roughcalib::est

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roughcalib/paths/covariance.hpp"
#include "roughcalib/paths/path.hpp"

namespace roughcalib::paths {

// Path i is L * xi with xi drawn from RandomStream(derive_seed(seed, first_index + i)),
// so any subset of paths can be regenerated independently.
std::vector<Path> sample_gaussian_paths(const CholeskyFactor& factor, const GridSpec& grid,
                                        std::size_t count, std::uint64_t seed,
                                        std::uint64_t first_index = 0);
Path sample_gaussian_path(const CholeskyFactor& factor, const GridSpec& grid, std::uint64_t seed,
                          std::uint64_t index);

// log(v_t / v_0) = Z_t - (eta^2 / 2) t^(2 alpha + 1); identity when the drift is off.
Path normalized_log_variance(const Path& z, const RBergomiParams& params);

// Exact rBergomi normalized log-variance and fBm sample paths.
std::vector<Path> simulate_rbergomi(const GridSpec& grid, const RBergomiParams& params,
                                    std::size_t count, std::uint64_t seed);
std::vector<Path> simulate_fbm(const GridSpec& grid, double hurst, std::size_t count,
                               std::uint64_t seed);

// dX = (a - b X) dt + c X dW, X_0 = x0.
struct OuParams {
  double x0 = 0.1;
  double a = 1.0;
  double b = 2.1;
  double c = 0.3;
};

// Euler-Maruyama; the stored values are X_1..X_n (the initial value is not part of the path).
Path ou_euler_maruyama(const OuParams& params, const GridSpec& grid, std::uint64_t seed);
std::vector<Path> simulate_ou(const OuParams& params, const GridSpec& grid, std::size_t count,
                              std::uint64_t seed);

}  // namespace roughcalib::paths

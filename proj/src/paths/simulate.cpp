#include "roughcalib/paths/simulate.hpp"

#include <cmath>

#include "roughcalib/error.hpp"
#include "roughcalib/random.hpp"

namespace roughcalib::paths {

Path sample_gaussian_path(const CholeskyFactor& factor, const GridSpec& grid, std::uint64_t seed,
                          std::uint64_t index) {
  if (factor.size() != grid.n) throw ConfigError("Cholesky factor size does not match grid");
  RandomStream rng(derive_seed(seed, index));
  std::vector<double> xi(grid.n);
  rng.fill_normal(xi);
  return {grid, factor.apply(xi)};
}

std::vector<Path> sample_gaussian_paths(const CholeskyFactor& factor, const GridSpec& grid,
                                        std::size_t count, std::uint64_t seed,
                                        std::uint64_t first_index) {
  std::vector<Path> paths;
  paths.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    paths.push_back(sample_gaussian_path(factor, grid, seed, first_index + i));
  }
  return paths;
}

Path normalized_log_variance(const Path& z, const RBergomiParams& params) {
  if (!params.include_drift) return z;
  Path out = z;
  const double half_eta2 = 0.5 * params.eta * params.eta;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] -= half_eta2 * std::pow(z.grid.time(i), 2.0 * params.alpha + 1.0);
  }
  return out;
}

std::vector<Path> simulate_rbergomi(const GridSpec& grid, const RBergomiParams& params,
                                    std::size_t count, std::uint64_t seed) {
  const CholeskyFactor factor = cholesky(rbergomi_covariance(grid, params));
  std::vector<Path> paths = sample_gaussian_paths(factor, grid, count, seed);
  for (auto& p : paths) p = normalized_log_variance(p, params);
  return paths;
}

std::vector<Path> simulate_fbm(const GridSpec& grid, double hurst, std::size_t count,
                               std::uint64_t seed) {
  return sample_gaussian_paths(cholesky(fbm_covariance(grid, hurst)), grid, count, seed);
}

Path ou_euler_maruyama(const OuParams& params, const GridSpec& grid, std::uint64_t seed) {
  grid.validate();
  RandomStream rng(seed);
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  Path path{grid, std::vector<double>(grid.n)};
  double x = params.x0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double xi = rng.normal();
    x = x + (params.a - params.b * x) * dt + params.c * x * sqrt_dt * xi;
    path.values[i] = x;
  }
  return path;
}

std::vector<Path> simulate_ou(const OuParams& params, const GridSpec& grid, std::size_t count,
                              std::uint64_t seed) {
  std::vector<Path> paths;
  paths.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    paths.push_back(ou_euler_maruyama(params, grid, derive_seed(seed, i)));
  }
  return paths;
}

}  // namespace roughcalib::paths

#pragma once

#include <cstddef>
#include <vector>

#include "roughcalib/paths/path.hpp"

namespace roughcalib::paths {

// Volterra kernel eta * sqrt(2 alpha + 1) * (t - s)^alpha driving the
// log-variance of the rough Bergomi model; Hurst exponent H = alpha + 1/2.
struct RBergomiParams {
  double alpha = -0.4;
  double eta = 1.0;
  // Subtract (eta^2 / 2) t^(2 alpha + 1) when forming log(v_t / v_0).
  bool include_drift = false;

  static RBergomiParams from_hurst(double hurst, double eta = 1.0, bool include_drift = false) {
    return {hurst - 0.5, eta, include_drift};
  }
  double hurst() const noexcept { return alpha + 0.5; }
  void validate() const;
};

// Dense symmetric n x n matrix, row-major.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }
  double max_diagonal() const;
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

// Lower-triangular L with L L^T equal to the factored matrix; row-major.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  // Diagonal jitter that was added before the factorization succeeded.
  double jitter() const noexcept { return jitter_; }
  void set_jitter(double j) noexcept { jitter_ = j; }

  // y = L x
  std::vector<double> apply(const std::vector<double>& x) const;
  CholeskyFactor scaled(double factor) const;
  SymmetricMatrix reconstruct() const;

 private:
  std::size_t n_;
  std::vector<double> values_;
  double jitter_ = 0.0;
};

double fbm_covariance(double s, double t, double hurst);
SymmetricMatrix fbm_covariance(const GridSpec& grid, double hurst);

// 2F1(-alpha, 1; alpha + 2; z) for alpha in (-1/2, 0], z in [0, 1].
double volterra_hypergeometric(double alpha, double z);

// E[Z_s Z_t] = eta^2 (2 alpha + 1) int_0^min(s,t) ((s - u)(t - u))^alpha du
//            = eta^2 (2 alpha + 1)/(alpha + 1) s^(alpha+1) t^alpha 2F1(-alpha, 1; alpha + 2; s/t)
// for s <= t.
double rbergomi_covariance(double s, double t, const RBergomiParams& params);
SymmetricMatrix rbergomi_covariance(const GridSpec& grid, const RBergomiParams& params);

// Throws MatrixError (with the failing pivot) when the matrix is not
// positive definite even after one retry with jitter 1e-12 * max(diag).
CholeskyFactor cholesky(const SymmetricMatrix& matrix, bool allow_jitter = true);

double relative_frobenius_error(const SymmetricMatrix& a, const SymmetricMatrix& b);

}  // namespace roughcalib::paths

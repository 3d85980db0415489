#include "roughcalib/paths/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "roughcalib/error.hpp"

namespace roughcalib::paths {

namespace {

constexpr double kSeriesTolerance = 1e-16;
constexpr std::size_t kMaxTerms = 200000;
// Above this argument the series in z is replaced by the expansion about z = 1.
constexpr double kSwitchToReflection = 0.9;

// Plain Gauss series sum_k (a)_k (b)_k / ((c)_k k!) z^k with b = 1, i.e.
// sum_k (a)_k / (c)_k z^k.
double series_b1(double a, double c, double z) {
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t k = 0; k < kMaxTerms; ++k) {
    term *= (a + static_cast<double>(k)) / (c + static_cast<double>(k)) * z;
    sum += term;
    if (std::abs(term) <= kSeriesTolerance * std::abs(sum)) return sum;
  }
  throw NumericalError("hypergeometric series did not converge");
}

}  // namespace

void RBergomiParams::validate() const {
  if (!(alpha > -0.5 && alpha <= 0.0)) {
    throw ParameterError("rBergomi alpha must lie in (-1/2, 0], i.e. H in (0, 1/2]");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("rBergomi eta must be > 0");
}

double SymmetricMatrix::max_diagonal() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) m = std::max(m, (*this)(i, i));
  return m;
}

std::vector<double> CholeskyFactor::apply(const std::vector<double>& x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = values_.data() + i * n_;
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

CholeskyFactor CholeskyFactor::scaled(double factor) const {
  CholeskyFactor out = *this;
  for (double& v : out.values_) v *= factor;
  out.jitter_ = jitter_ * factor * factor;
  return out;
}

SymmetricMatrix CholeskyFactor::reconstruct() const {
  SymmetricMatrix m(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= j; ++k) acc += (*this)(i, k) * (*this)(j, k);
      m.set(i, j, acc);
    }
  }
  return m;
}

double fbm_covariance(double s, double t, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ParameterError("fBm Hurst exponent must lie in (0, 1)");
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) - std::pow(std::abs(t - s), h2));
}

SymmetricMatrix fbm_covariance(const GridSpec& grid, double hurst) {
  grid.validate();
  if (!(hurst > 0.0 && hurst < 1.0)) throw ParameterError("fBm Hurst exponent must lie in (0, 1)");
  SymmetricMatrix m(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, fbm_covariance(grid.time(j), grid.time(i), hurst));
  }
  return m;
}

double volterra_hypergeometric(double alpha, double z) {
  if (!(alpha > -0.5 && alpha <= 0.0)) throw ParameterError("alpha must lie in (-1/2, 0]");
  if (!(z >= 0.0 && z <= 1.0)) throw ParameterError("hypergeometric argument must lie in [0, 1]");
  if (alpha == 0.0) return 1.0;
  const double a = -alpha;
  const double c = alpha + 2.0;
  if (z <= kSwitchToReflection) return series_b1(a, c, z);
  // Expansion about z = 1 (c - a - b = 2 alpha + 1 is non-integer here):
  //   F = A 2F1(a, 1; -2 alpha; 1 - z) + B (1 - z)^(2 alpha + 1) z^(-alpha - 1),
  // the second hypergeometric having collapsed to z^(-alpha-1) because its
  // first and third parameters coincide.
  const double w = 1.0 - z;
  const double coeff_a = (alpha + 1.0) / (2.0 * alpha + 1.0);
  const double coeff_b =
      std::tgamma(alpha + 2.0) * std::tgamma(-2.0 * alpha - 1.0) / std::tgamma(-alpha);
  const double regular = w == 0.0 ? 1.0 : series_b1(a, -2.0 * alpha, w);
  const double singular = w == 0.0 ? 0.0 : std::pow(w, 2.0 * alpha + 1.0) * std::pow(z, -alpha - 1.0);
  return coeff_a * regular + coeff_b * singular;
}

double rbergomi_covariance(double s, double t, const RBergomiParams& params) {
  params.validate();
  if (s > t) std::swap(s, t);
  if (!(s > 0.0)) return 0.0;
  const double alpha = params.alpha;
  const double eta2 = params.eta * params.eta;
  if (s == t) return eta2 * std::pow(t, 2.0 * alpha + 1.0);
  const double z = s / t;
  return eta2 * (2.0 * alpha + 1.0) / (alpha + 1.0) * std::pow(s, alpha + 1.0) *
         std::pow(t, alpha) * volterra_hypergeometric(alpha, z);
}

SymmetricMatrix rbergomi_covariance(const GridSpec& grid, const RBergomiParams& params) {
  grid.validate();
  params.validate();
  const double alpha = params.alpha;
  const double eta2 = params.eta * params.eta;
  const double prefactor = eta2 * (2.0 * alpha + 1.0) / (alpha + 1.0);
  SymmetricMatrix m(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.time(i);
    m.set(i, i, eta2 * std::pow(t, 2.0 * alpha + 1.0));
    for (std::size_t j = 0; j < i; ++j) {
      const double s = grid.time(j);
      m.set(i, j,
            prefactor * std::pow(s, alpha + 1.0) * std::pow(t, alpha) *
                volterra_hypergeometric(alpha, s / t));
    }
  }
  return m;
}

namespace {

// Returns the failing pivot index, or nothing on success.
std::optional<std::size_t> factor_into(const SymmetricMatrix& a, double jitter, CholeskyFactor& l) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j) + jitter;
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) return j;
    const double pivot = std::sqrt(diag);
    l.at(j, j) = pivot;
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      l.at(i, j) = acc / pivot;
    }
  }
  return std::nullopt;
}

}  // namespace

CholeskyFactor cholesky(const SymmetricMatrix& matrix, bool allow_jitter) {
  CholeskyFactor l(matrix.size());
  auto failed = factor_into(matrix, 0.0, l);
  if (!failed) return l;
  if (allow_jitter) {
    const double jitter = 1e-12 * matrix.max_diagonal();
    l = CholeskyFactor(matrix.size());
    failed = factor_into(matrix, jitter, l);
    if (!failed) {
      l.set_jitter(jitter);
      return l;
    }
  }
  throw MatrixError("matrix is not positive definite (pivot " + std::to_string(*failed) + ")",
                    *failed);
}

double relative_frobenius_error(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    diff += d * d;
    norm += a.values()[i] * a.values()[i];
  }
  return std::sqrt(diff / norm);
}

}  // namespace roughcalib::paths

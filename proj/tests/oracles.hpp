#pragma once

// Independent reference computations used only by tests. Nothing here may
// call into the code paths being checked.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

namespace oracle {

// eta^2 (2a+1) int_0^s ((s-u)(t-u))^a du for 0 < s <= t, by tanh-sinh
// quadrature of int_0^s v^a (t - s + v)^a dv (v = s - u), whose algebraic
// endpoint singularity at v = 0 the double-exponential rule absorbs.
inline double rbergomi_covariance_quadrature(double s, double t, double alpha, double eta) {
  if (s > t) std::swap(s, t);
  const double gap = t - s;
  auto f = [&](double v) { return std::pow(v, alpha) * std::pow(gap + v, alpha); };
  boost::math::quadrature::tanh_sinh<double> rule(15);
  double error = 0.0;
  const double integral = rule.integrate(f, 0.0, s, 1e-15, &error);
  return eta * eta * (2.0 * alpha + 1.0) * integral;
}

// Two-sided 99% band for a sample variance of `n` draws with true variance sigma2.
struct Band {
  double low;
  double high;
};
inline Band variance_band_99(std::size_t n, double sigma2) {
  const boost::math::chi_squared chi(static_cast<double>(n - 1));
  const double df = static_cast<double>(n - 1);
  return {sigma2 * boost::math::quantile(chi, 0.005) / df,
          sigma2 * boost::math::quantile(chi, 0.995) / df};
}

// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Asymptotic 1% critical value sqrt(-ln(0.005)/2) / sqrt(n).
inline double ks_critical_1pct(std::size_t n) {
  return std::sqrt(-0.5 * std::log(0.005)) / std::sqrt(static_cast<double>(n));
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Ordinary least squares via the 2x2 normal equations.
inline std::pair<double, double> normal_equation_fit(const std::vector<double>& x,
                                                     const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;
  return {slope, intercept};
}

}  // namespace oracle

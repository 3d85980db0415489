#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace roughcalib::data {

enum class SamplerKind {
  discrete_grid,       // {0.1, 0.2, 0.3, 0.4, 0.5}
  uniform_five,        // five values once drawn from Uniform(0, 0.5)
  beta_five,           // five values once drawn from Beta(1, 9)
  uniform_continuous,  // fresh Uniform(0, 0.5) draw per path
  beta_continuous,     // fresh Beta(1, 9) draw per path
  explicit_list,
};

struct HSampler {
  SamplerKind kind = SamplerKind::discrete_grid;
  std::vector<double> values;  // explicit_list only

  static HSampler discrete() { return {SamplerKind::discrete_grid, {}}; }
  static HSampler uniform_five() { return {SamplerKind::uniform_five, {}}; }
  static HSampler beta_five() { return {SamplerKind::beta_five, {}}; }
  static HSampler uniform() { return {SamplerKind::uniform_continuous, {}}; }
  static HSampler beta() { return {SamplerKind::beta_continuous, {}}; }
  static HSampler list(std::vector<double> v) { return {SamplerKind::explicit_list, std::move(v)}; }

  // Fixed value set for the list-type samplers; empty for continuous ones.
  std::vector<double> fixed_values() const;
  bool is_fixed() const { return kind != SamplerKind::uniform_continuous && kind != SamplerKind::beta_continuous; }
  void validate() const;
};

// Names used on the command line: discrete, uniform5, beta5, uniform, beta.
std::string sampler_name(const HSampler& sampler);
HSampler sampler_from_name(const std::string& name);

// Fixed samplers cycle their value set (value i % k); continuous samplers
// draw i.i.d. from a stream seeded with `seed`. With upper < 1 the Beta draw
// is conditioned on H <= upper (inverse CDF on [0, F(upper)]) and fixed
// values above `upper` are rejected.
std::vector<double> sample_h(const HSampler& sampler, std::size_t count, std::uint64_t seed,
                             double upper = 1.0);

// Beta(1, 9) has F(x) = 1 - (1 - x)^9, hence F^-1(u) = 1 - (1 - u)^(1/9).
double beta19_inverse_cdf(double u);
double beta19_cdf(double x);

std::vector<double> sample_eta(double low, double high, std::size_t count, std::uint64_t seed);

}  // namespace roughcalib::data

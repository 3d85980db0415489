#include "roughcalib/data/h_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "roughcalib/error.hpp"
#include "roughcalib/random.hpp"

namespace roughcalib::data {

std::vector<double> HSampler::fixed_values() const {
  switch (kind) {
    case SamplerKind::discrete_grid:
      return {0.1, 0.2, 0.3, 0.4, 0.5};
    case SamplerKind::uniform_five:
      return {0.05, 0.18, 0.29, 0.31, 0.44};
    case SamplerKind::beta_five:
      return {0.02, 0.07, 0.06, 0.13, 0.22};
    case SamplerKind::explicit_list:
      return values;
    case SamplerKind::uniform_continuous:
    case SamplerKind::beta_continuous:
      break;
  }
  return {};
}

void HSampler::validate() const {
  if (kind == SamplerKind::explicit_list) {
    if (values.empty()) throw ConfigError("explicit H list is empty");
    for (double h : values) {
      if (!(h > 0.0 && h < 1.0)) throw ParameterError("H values must lie in (0, 1)");
    }
  }
}

std::string sampler_name(const HSampler& sampler) {
  switch (sampler.kind) {
    case SamplerKind::discrete_grid: return "discrete";
    case SamplerKind::uniform_five: return "uniform5";
    case SamplerKind::beta_five: return "beta5";
    case SamplerKind::uniform_continuous: return "uniform";
    case SamplerKind::beta_continuous: return "beta";
    case SamplerKind::explicit_list: return "list";
  }
  return "unknown";
}

HSampler sampler_from_name(const std::string& name) {
  if (name == "discrete") return HSampler::discrete();
  if (name == "uniform5") return HSampler::uniform_five();
  if (name == "beta5") return HSampler::beta_five();
  if (name == "uniform") return HSampler::uniform();
  if (name == "beta") return HSampler::beta();
  throw ConfigError("unknown H sampler '" + name + "' (expected discrete|uniform5|beta5|uniform|beta)");
}

double beta19_inverse_cdf(double u) { return 1.0 - std::pow(1.0 - u, 1.0 / 9.0); }

double beta19_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - x, 9.0);
}

std::vector<double> sample_h(const HSampler& sampler, std::size_t count, std::uint64_t seed,
                             double upper) {
  sampler.validate();
  std::vector<double> out(count);
  if (sampler.is_fixed()) {
    const auto set = sampler.fixed_values();
    for (double h : set) {
      if (h > upper) throw ParameterError("H value above the model limit " + std::to_string(upper));
    }
    for (std::size_t i = 0; i < count; ++i) out[i] = set[i % set.size()];
    return out;
  }
  const double mass = beta19_cdf(upper);
  const double half = std::min(0.5, upper);
  RandomStream rng(seed);
  for (double& h : out) {
    const double u = rng.uniform_open();
    h = sampler.kind == SamplerKind::beta_continuous ? beta19_inverse_cdf(u * mass) : half * u;
  }
  return out;
}

std::vector<double> sample_eta(double low, double high, std::size_t count, std::uint64_t seed) {
  if (!(low >= 0.0 && low < high)) throw ParameterError("eta range needs 0 <= low < high");
  RandomStream rng(seed);
  std::vector<double> out(count);
  for (double& e : out) e = low + (high - low) * rng.uniform_open();
  return out;
}

}  // namespace roughcalib::data

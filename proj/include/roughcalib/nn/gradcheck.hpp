#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roughcalib/nn/network.hpp"

namespace roughcalib::nn {

struct GradientCheck {
  std::size_t parameters = 0;
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;  // flat index over all parameter tensors
};

// Compares backward() against central differences of the batch MSE for every
// scalar parameter. Relative error is |a - b| / max(|a| + |b|, floor).
GradientCheck check_gradients(const NetworkConfig& config, const ModelState& state,
                              const std::vector<Tensor>& inputs, const std::vector<Tensor>& targets,
                              double step = 1e-6, double floor = 1e-6);

// Small network mixing every layer kind except (active) dropout, with at most
// `max_parameters` trainable scalars.
NetworkConfig random_small_config(std::uint64_t seed, std::size_t max_parameters = 1000);

}  // namespace roughcalib::nn

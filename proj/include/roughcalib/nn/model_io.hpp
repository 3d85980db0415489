#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "roughcalib/nn/network.hpp"

namespace roughcalib::nn {

// Model file layout:
//
//   roughcalib-model <version>
//   input_length <N>
//   layer <kind> [key=value ...]      one line per layer
//   adam lr=<> beta1=<> beta2=<> epsilon=<>
//   step <t>
//   end
//   <parameter tensors: little-endian f64, row-major, layer order,
//    weights before biases>
//
// Optimizer moments are not stored; a loaded model starts with zero moments.
inline constexpr int kModelFormatVersion = 1;

struct LoadedModel {
  NetworkConfig config;
  ModelState state;
};

std::string config_to_text(const NetworkConfig& config);
// Parses the `input_length` and `layer` lines of a header.
NetworkConfig config_from_text(const std::string& text);

void save_model(std::ostream& out, const NetworkConfig& config, const ModelState& state);
void save_model(const std::filesystem::path& file, const NetworkConfig& config,
                const ModelState& state);

// Throws LoadError for missing/truncated files, bad headers, unknown layer
// kinds and unsupported format versions.
LoadedModel load_model(std::istream& in);
LoadedModel load_model(const std::filesystem::path& file);

}  // namespace roughcalib::nn

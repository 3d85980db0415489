#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "roughcalib/data/h_sampler.hpp"
#include "roughcalib/paths/path.hpp"

namespace roughcalib::data {

enum class PathModel { rbergomi, fbm };

struct EtaPolicy {
  bool random = false;
  double value = 1.0;  // used when !random
  double low = 0.0;    // Uniform(low, high) when random
  double high = 3.0;

  static EtaPolicy fixed(double eta) { return {false, eta, 0.0, 3.0}; }
  static EtaPolicy uniform(double low = 0.0, double high = 3.0) { return {true, 1.0, low, high}; }
};

struct DatasetSpec {
  HSampler sampler = HSampler::discrete();
  EtaPolicy eta = EtaPolicy::fixed(1.0);
  PathModel model = PathModel::rbergomi;
  paths::GridSpec grid{100, 1.0};
  std::size_t total_paths = 5000;
  bool label_eta = false;      // targets (H, eta) instead of H
  bool include_drift = false;  // rBergomi only
  std::uint64_t seed = 1;

  // Canonical text of every field; hashed into the dataset file header.
  std::string describe() const;
};

struct SplitSizes {
  std::size_t train = 14000;
  std::size_t test = 7500;
  std::size_t validation = 3500;

  std::size_t total() const { return train + test + validation; }
  // 14000 : 7500 : 3500 scaled to `total` (rounded, remainder to train).
  static SplitSizes proportional(std::size_t total);
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::size_t> validation;
};

struct LabeledDataset {
  paths::GridSpec grid;
  std::size_t label_dim = 1;
  std::uint64_t config_digest = 0;
  std::vector<paths::Path> inputs;
  std::vector<std::vector<double>> targets;
  Split split;

  std::size_t size() const noexcept { return inputs.size(); }
  void validate() const;
};

// Simulates every path at its own (H, eta). Path i uses noise stream
// derive_seed(seed, i); Cholesky factors are shared between paths with the
// same H (eta only rescales the factor).
LabeledDataset build_dataset(const DatasetSpec& spec);

// Seeded uniformly random disjoint partition; sizes must sum to the dataset size.
void split_dataset(LabeledDataset& dataset, const SplitSizes& sizes, std::uint64_t seed);

// Subset views (copies) by index list.
LabeledDataset subset(const LabeledDataset& dataset, const std::vector<std::size_t>& indices);

// Flat binary file: text magic line, u64 header fields, split indices, then
// little-endian f64 inputs and targets.
void save_dataset(std::ostream& out, const LabeledDataset& dataset);
void save_dataset(const std::filesystem::path& file, const LabeledDataset& dataset);
LabeledDataset load_dataset(std::istream& in);
LabeledDataset load_dataset(const std::filesystem::path& file);

// One row per path: split,label_0[,label_1],x_1..x_n.
void write_dataset_csv(std::ostream& out, const LabeledDataset& dataset);

}  // namespace roughcalib::data

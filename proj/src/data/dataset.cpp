#include "roughcalib/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "roughcalib/binary_io.hpp"
#include "roughcalib/error.hpp"
#include "roughcalib/paths/covariance.hpp"
#include "roughcalib/paths/simulate.hpp"
#include "roughcalib/random.hpp"

namespace roughcalib::data {

namespace {

constexpr const char* kDatasetMagic = "roughcalib-dataset 1";
constexpr std::uint64_t kHStream = 0x48;    // 'H'
constexpr std::uint64_t kEtaStream = 0x45;  // 'E'
constexpr std::uint64_t kPathStream = 0x50; // 'P'

paths::CholeskyFactor unit_factor(const DatasetSpec& spec, double hurst) {
  if (spec.model == PathModel::fbm) return paths::cholesky(paths::fbm_covariance(spec.grid, hurst));
  return paths::cholesky(paths::rbergomi_covariance(spec.grid, paths::RBergomiParams::from_hurst(hurst)));
}

}  // namespace

std::string DatasetSpec::describe() const {
  std::ostringstream out;
  out << "sampler=" << sampler_name(sampler);
  for (double v : sampler.values) out << ',' << io::format_double(v);
  out << ";eta=" << (eta.random ? "random" : io::format_double(eta.value))
      << ";eta_range=" << io::format_double(eta.low) << ',' << io::format_double(eta.high)
      << ";model=" << (model == PathModel::fbm ? "fbm" : "rbergomi") << ";n=" << grid.n
      << ";T=" << io::format_double(grid.horizon) << ";paths=" << total_paths
      << ";label_eta=" << label_eta << ";drift=" << include_drift << ";seed=" << seed;
  return out.str();
}

SplitSizes SplitSizes::proportional(std::size_t total) {
  const auto scaled = [&](std::size_t part) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(total) * part / 25000.0));
  };
  SplitSizes s;
  s.test = scaled(7500);
  s.validation = scaled(3500);
  s.train = total - s.test - s.validation;
  return s;
}

void LabeledDataset::validate() const {
  if (inputs.size() != targets.size()) throw ConfigError("dataset inputs/targets are misaligned");
  for (const auto& t : targets) {
    if (t.size() != label_dim) throw ConfigError("dataset target has the wrong dimension");
  }
  for (const auto& p : inputs) {
    if (p.values.size() != grid.n) throw ConfigError("dataset path has the wrong length");
  }
  const std::size_t assigned = split.train.size() + split.test.size() + split.validation.size();
  if (assigned == 0) return;
  if (assigned != size()) throw ConfigError("split does not cover the dataset");
  std::vector<char> seen(size(), 0);
  for (const auto* part : {&split.train, &split.test, &split.validation}) {
    for (std::size_t i : *part) {
      if (i >= size() || seen[i]) throw ConfigError("split sets overlap or are out of range");
      seen[i] = 1;
    }
  }
}

LabeledDataset build_dataset(const DatasetSpec& spec) {
  spec.grid.validate();
  spec.sampler.validate();
  if (spec.total_paths < 1) throw ConfigError("dataset needs at least one path");
  if (spec.sampler.is_fixed()) {
    const std::size_t k = spec.sampler.fixed_values().size();
    if (spec.total_paths % k != 0) {
      throw ConfigError("total paths (" + std::to_string(spec.total_paths) +
                        ") must be a multiple of the number of H values (" + std::to_string(k) + ")");
    }
  }
  const std::vector<double> hs =
      sample_h(spec.sampler, spec.total_paths, derive_seed(spec.seed, kHStream),
               spec.model == PathModel::rbergomi ? 0.5 : 1.0);
  const std::vector<double> etas =
      spec.eta.random ? sample_eta(spec.eta.low, spec.eta.high, spec.total_paths,
                                   derive_seed(spec.seed, kEtaStream))
                      : std::vector<double>(spec.total_paths, spec.eta.value);
  if (!spec.eta.random && !(spec.eta.value > 0.0)) throw ParameterError("eta must be > 0");

  LabeledDataset ds;
  ds.grid = spec.grid;
  ds.label_dim = spec.label_eta ? 2 : 1;
  ds.config_digest = io::fnv1a(spec.describe());
  ds.inputs.reserve(spec.total_paths);
  ds.targets.reserve(spec.total_paths);

  std::map<double, paths::CholeskyFactor> cache;
  const std::uint64_t path_seed = derive_seed(spec.seed, kPathStream);
  for (std::size_t i = 0; i < spec.total_paths; ++i) {
    const double h = hs[i];
    auto it = cache.find(h);
    if (it == cache.end()) {
      if (!spec.sampler.is_fixed()) cache.clear();
      it = cache.emplace(h, unit_factor(spec, h)).first;
    }
    paths::Path path = paths::sample_gaussian_path(it->second, spec.grid, path_seed, i);
    if (spec.model == PathModel::rbergomi) {
      for (double& v : path.values) v *= etas[i];
      path = paths::normalized_log_variance(
          path, paths::RBergomiParams::from_hurst(h, etas[i], spec.include_drift));
    }
    ds.inputs.push_back(std::move(path));
    if (spec.label_eta) {
      ds.targets.push_back({h, etas[i]});
    } else {
      ds.targets.push_back({h});
    }
  }
  return ds;
}

void split_dataset(LabeledDataset& dataset, const SplitSizes& sizes, std::uint64_t seed) {
  if (sizes.total() != dataset.size()) {
    throw ConfigError("split sizes sum to " + std::to_string(sizes.total()) + " but dataset has " +
                      std::to_string(dataset.size()) + " paths");
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto begin = order.begin();
  dataset.split.train.assign(begin, begin + static_cast<std::ptrdiff_t>(sizes.train));
  dataset.split.test.assign(begin + static_cast<std::ptrdiff_t>(sizes.train),
                            begin + static_cast<std::ptrdiff_t>(sizes.train + sizes.test));
  dataset.split.validation.assign(begin + static_cast<std::ptrdiff_t>(sizes.train + sizes.test),
                                  order.end());
}

LabeledDataset subset(const LabeledDataset& dataset, const std::vector<std::size_t>& indices) {
  LabeledDataset out;
  out.grid = dataset.grid;
  out.label_dim = dataset.label_dim;
  out.config_digest = dataset.config_digest;
  for (std::size_t i : indices) {
    out.inputs.push_back(dataset.inputs.at(i));
    out.targets.push_back(dataset.targets.at(i));
  }
  return out;
}

void save_dataset(std::ostream& out, const LabeledDataset& dataset) {
  dataset.validate();
  out << kDatasetMagic << '\n';
  io::write_u64(out, dataset.size());
  io::write_u64(out, dataset.grid.n);
  io::write_u64(out, dataset.label_dim);
  io::write_u64(out, dataset.config_digest);
  const double horizon = dataset.grid.horizon;
  io::write_f64(out, std::span<const double>(&horizon, 1));
  for (const auto* part : {&dataset.split.train, &dataset.split.test, &dataset.split.validation}) {
    io::write_u64(out, part->size());
    for (std::size_t i : *part) io::write_u64(out, i);
  }
  for (const auto& p : dataset.inputs) io::write_f64(out, p.values);
  for (const auto& t : dataset.targets) io::write_f64(out, t);
  if (!out) throw std::runtime_error("failed to write dataset");
}

void save_dataset(const std::filesystem::path& file, const LabeledDataset& dataset) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + file.string() + "' for writing");
  save_dataset(out, dataset);
}

LabeledDataset load_dataset(std::istream& in) {
  std::string magic;
  if (!std::getline(in, magic) || magic != kDatasetMagic) {
    throw LoadError("not a roughcalib dataset file (or unsupported version)");
  }
  const std::uint64_t count = io::read_u64(in);
  LabeledDataset ds;
  ds.grid.n = io::read_u64(in);
  ds.label_dim = io::read_u64(in);
  ds.config_digest = io::read_u64(in);
  io::read_f64(in, std::span<double>(&ds.grid.horizon, 1));
  if (ds.grid.n == 0 || ds.label_dim == 0 || ds.label_dim > 2 || count > (1ULL << 32)) {
    throw LoadError("implausible dataset header");
  }
  for (auto* part : {&ds.split.train, &ds.split.test, &ds.split.validation}) {
    const std::uint64_t m = io::read_u64(in);
    if (m > count) throw LoadError("split larger than dataset");
    part->resize(m);
    for (auto& i : *part) i = io::read_u64(in);
  }
  ds.inputs.resize(count, paths::Path{ds.grid, std::vector<double>(ds.grid.n)});
  for (auto& p : ds.inputs) io::read_f64(in, p.values);
  ds.targets.resize(count, std::vector<double>(ds.label_dim));
  for (auto& t : ds.targets) io::read_f64(in, t);
  try {
    ds.validate();
  } catch (const ConfigError& e) {
    throw LoadError(std::string("inconsistent dataset file: ") + e.what());
  }
  return ds;
}

LabeledDataset load_dataset(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError("cannot open dataset file '" + file.string() + "'");
  return load_dataset(in);
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& dataset) {
  std::vector<const char*> role(dataset.size(), "none");
  for (std::size_t i : dataset.split.train) role[i] = "train";
  for (std::size_t i : dataset.split.test) role[i] = "test";
  for (std::size_t i : dataset.split.validation) role[i] = "validation";
  out << "split,H";
  if (dataset.label_dim == 2) out << ",eta";
  for (std::size_t j = 0; j < dataset.grid.n; ++j) out << ",x" << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << role[i];
    for (double t : dataset.targets[i]) out << ',' << io::format_double(t);
    for (double v : dataset.inputs[i].values) out << ',' << io::format_double(v);
    out << '\n';
  }
}

}  // namespace roughcalib::data

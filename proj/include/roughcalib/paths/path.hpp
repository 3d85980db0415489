#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace roughcalib::paths {

// Uniform grid t_i = i * horizon / n, i = 1..n. t = 0 is excluded: the
// processes simulated here vanish there and would make covariances singular.
struct GridSpec {
  std::size_t n = 100;
  double horizon = 1.0;

  double dt() const { return horizon / static_cast<double>(n); }
  // Time of the sample at zero-based position i, i.e. t_{i+1}.
  double time(std::size_t i) const { return static_cast<double>(i + 1) * dt(); }
  std::vector<double> times() const;
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Path {
  GridSpec grid;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

// One path per row; '#'-prefixed comment lines carry n, T and any
// simulation parameters as key=value.
void write_paths_csv(std::ostream& out, const std::vector<Path>& paths,
                     const std::map<std::string, std::string>& parameters = {});

struct PathCsv {
  std::vector<Path> paths;
  std::map<std::string, std::string> parameters;
};
PathCsv read_paths_csv(std::istream& in);

}  // namespace roughcalib::paths

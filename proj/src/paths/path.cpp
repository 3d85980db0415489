#include "roughcalib/paths/path.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "roughcalib/binary_io.hpp"
#include "roughcalib/error.hpp"

namespace roughcalib::paths {

std::vector<double> GridSpec::times() const {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = time(i);
  return t;
}

void GridSpec::validate() const {
  if (n < 1) throw ParameterError("grid needs at least one point");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("grid horizon must be > 0");
}

void write_paths_csv(std::ostream& out, const std::vector<Path>& paths,
                     const std::map<std::string, std::string>& parameters) {
  const GridSpec grid = paths.empty() ? GridSpec{} : paths.front().grid;
  out << "# n=" << grid.n << '\n';
  out << "# T=" << io::format_double(grid.horizon) << '\n';
  for (const auto& [key, value] : parameters) out << "# " << key << '=' << value << '\n';
  for (const auto& p : paths) {
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      if (i > 0) out << ',';
      out << io::format_double(p.values[i]);
    }
    out << '\n';
  }
}

PathCsv read_paths_csv(std::istream& in) {
  PathCsv csv;
  GridSpec grid;
  bool have_n = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      try {
        if (key == "n") {
          grid.n = static_cast<std::size_t>(std::stoull(value));
          have_n = true;
        } else if (key == "T") {
          grid.horizon = io::parse_double(value);
        } else {
          csv.parameters[key] = value;
        }
      } catch (const std::exception&) {
        throw ParseError("bad header value for '" + key + "'", line_no);
      }
      continue;
    }
    Path path{grid, {}};
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        path.values.push_back(io::parse_double(cell));
      } catch (const std::invalid_argument&) {
        throw ParseError("unparseable value '" + cell + "'", line_no);
      }
    }
    if (!have_n) {
      path.grid.n = path.values.size();
    } else if (path.values.size() != grid.n) {
      throw ParseError("row length does not match n", line_no);
    }
    csv.paths.push_back(std::move(path));
  }
  return csv;
}

}  // namespace roughcalib::paths

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "roughcalib/est/estimators.hpp"
#include "roughcalib/nn/network.hpp"
#include "roughcalib/paths/path.hpp"

namespace roughcalib::calib {

struct Observation {
  std::string date;  // YYYY-MM-DD
  double rv = 0.0;
};

struct RealizedVolSeries {
  std::string symbol;
  std::vector<Observation> observations;  // strictly increasing dates
};

struct RealizedVolFile {
  std::vector<RealizedVolSeries> series;  // ordered by symbol
  std::size_t dropped_nonpositive = 0;
};

// Long-format `date,symbol,rv` CSV. Rows with rv <= 0 are dropped and
// counted; every other malformed row throws ParseError with its line number.
RealizedVolFile parse_realized_vol_csv(std::istream& in);
RealizedVolFile parse_realized_vol_csv(const std::filesystem::path& file);
void write_realized_vol_csv(std::ostream& out, const std::vector<RealizedVolSeries>& series);

struct WindowSpec {
  std::size_t total = 200;
  std::size_t window = 100;
  std::size_t stride = 10;
};

struct Window {
  std::size_t begin = 0;  // index into the full series
  std::size_t length = 0;
};

// Windows over the most recent `total` observations, at offsets 0, stride, ...
std::vector<Window> make_windows(std::size_t series_length, const WindowSpec& spec);

// x_i = log(rv_i) - log(rv_1), halved when half_log is set.
std::vector<double> preprocess_window(const std::vector<double>& rv, bool half_log = false);

struct WindowResult {
  std::string symbol;
  std::size_t begin = 0;
  std::string start_date;
  std::string end_date;
  double cnn_h = 0.0;
  double reference_h = 0.0;  // least-squares estimate
};

struct SymbolSummary {
  std::string symbol;
  std::size_t windows = 0;
  double mean_cnn_h = 0.0;
  double mean_reference_h = 0.0;
};

struct CalibrationReport {
  std::vector<WindowResult> windows;
  std::vector<SymbolSummary> symbols;
  std::vector<std::string> skipped;  // "symbol@begin: reason"
  double rmse = 0.0;                 // CNN vs reference over all windows
  double mean_difference = 0.0;
  double std_difference = 0.0;
};

struct CalibrationOptions {
  WindowSpec windows{};
  bool half_log = false;
  est::LsConfig ls{};
};

CalibrationReport calibrate(const nn::NetworkConfig& config, const nn::ModelState& state,
                            const std::vector<RealizedVolSeries>& series,
                            const CalibrationOptions& options);

// Synthetic daily series: rv_i = base * exp(Z_{t_i}) for an rBergomi path Z
// on a grid of `length` points spaced `dt` apart; dates count up from 2000-01-03.
RealizedVolSeries synthetic_series(const std::string& symbol, double hurst, double eta,
                                   std::size_t length, double dt, std::uint64_t seed,
                                   double base = 1e-4);

void write_report_csv(std::ostream& out, const CalibrationReport& report);
void write_report_summary(std::ostream& out, const CalibrationReport& report);

}  // namespace roughcalib::calib

#include "roughcalib/calib/calibration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "roughcalib/binary_io.hpp"
#include "roughcalib/error.hpp"
#include "roughcalib/paths/simulate.hpp"

namespace roughcalib::calib {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  const int y = std::stoi(s.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  return std::chrono::year_month_day(std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)).ok();
}

}  // namespace

RealizedVolFile parse_realized_vol_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) break;
  }
  if (trim(line) != "date,symbol,rv") throw ParseError("expected header 'date,symbol,rv'", line_no);

  RealizedVolFile file;
  std::map<std::string, std::map<std::string, double>> grouped;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line_no);
    const std::string date = trim(fields[0]);
    const std::string symbol = trim(fields[1]);
    if (!valid_iso_date(date)) throw ParseError("invalid ISO-8601 date '" + date + "'", line_no);
    if (symbol.empty()) throw ParseError("empty symbol", line_no);
    double rv = 0.0;
    try {
      rv = io::parse_double(trim(fields[2]));
    } catch (const std::invalid_argument&) {
      throw ParseError("unparseable rv '" + fields[2] + "'", line_no);
    }
    if (std::isnan(rv)) throw ParseError("rv is NaN", line_no);
    if (!(rv > 0.0) || std::isinf(rv)) {
      ++file.dropped_nonpositive;
      continue;
    }
    if (!grouped[symbol].emplace(date, rv).second) {
      throw ParseError("duplicate date " + date + " for symbol " + symbol, line_no);
    }
  }
  for (auto& [symbol, rows] : grouped) {
    RealizedVolSeries s{symbol, {}};
    for (const auto& [date, rv] : rows) s.observations.push_back({date, rv});
    file.series.push_back(std::move(s));
  }
  return file;
}

RealizedVolFile parse_realized_vol_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open '" + file.string() + "'", 0);
  return parse_realized_vol_csv(in);
}

void write_realized_vol_csv(std::ostream& out, const std::vector<RealizedVolSeries>& series) {
  out << "date,symbol,rv\n";
  for (const auto& s : series) {
    for (const auto& o : s.observations) out << o.date << ',' << s.symbol << ',' << io::format_double(o.rv) << '\n';
  }
}

std::vector<Window> make_windows(std::size_t series_length, const WindowSpec& spec) {
  if (spec.window == 0 || spec.stride == 0 || spec.window > spec.total) {
    throw ConfigError("window spec needs 0 < window <= total and stride > 0");
  }
  if (series_length < spec.total) {
    throw ConfigError("series has " + std::to_string(series_length) + " observations; " +
                      std::to_string(spec.total) + " are required");
  }
  const std::size_t base = series_length - spec.total;
  std::vector<Window> out;
  for (std::size_t offset = 0; offset + spec.window <= spec.total; offset += spec.stride) {
    out.push_back({base + offset, spec.window});
  }
  return out;
}

std::vector<double> preprocess_window(const std::vector<double>& rv, bool half_log) {
  if (rv.empty()) throw ConfigError("empty window");
  for (double v : rv) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("realized variance must be positive and finite");
  }
  const double scale = half_log ? 0.5 : 1.0;
  const double first = std::log(rv.front());
  std::vector<double> out(rv.size());
  for (std::size_t i = 0; i < rv.size(); ++i) out[i] = scale * (std::log(rv[i]) - first);
  return out;
}

CalibrationReport calibrate(const nn::NetworkConfig& config, const nn::ModelState& state,
                            const std::vector<RealizedVolSeries>& series,
                            const CalibrationOptions& options) {
  if (config.input_length != options.windows.window) {
    throw ConfigError("model input length " + std::to_string(config.input_length) +
                      " differs from the window length " + std::to_string(options.windows.window));
  }
  CalibrationReport report;
  std::vector<double> cnn_all, ref_all;
  for (const auto& s : series) {
    SymbolSummary summary{s.symbol, 0, 0.0, 0.0};
    for (const Window& w : make_windows(s.observations.size(), options.windows)) {
      std::vector<double> rv(w.length);
      for (std::size_t i = 0; i < w.length; ++i) rv[i] = s.observations[w.begin + i].rv;
      const auto x = preprocess_window(rv, options.half_log);
      double reference = 0.0;
      try {
        reference = est::ls_estimate_h(x, options.ls).h;
      } catch (const DegenerateInputError& e) {
        report.skipped.push_back(s.symbol + "@" + std::to_string(w.begin) + ": " + e.what());
        continue;
      }
      const double cnn = est::cnn_estimate_h(config, state, x).h;
      report.windows.push_back({s.symbol, w.begin, s.observations[w.begin].date,
                                s.observations[w.begin + w.length - 1].date, cnn, reference});
      cnn_all.push_back(cnn);
      ref_all.push_back(reference);
      ++summary.windows;
      summary.mean_cnn_h += cnn;
      summary.mean_reference_h += reference;
    }
    if (summary.windows > 0) {
      summary.mean_cnn_h /= static_cast<double>(summary.windows);
      summary.mean_reference_h /= static_cast<double>(summary.windows);
    }
    report.symbols.push_back(summary);
  }
  if (!cnn_all.empty()) {
    const auto stats = est::error_stats(cnn_all, ref_all);
    report.rmse = stats.rmse;
    report.mean_difference = stats.mean_difference;
    report.std_difference = stats.std_difference;
  }
  return report;
}

RealizedVolSeries synthetic_series(const std::string& symbol, double hurst, double eta,
                                   std::size_t length, double dt, std::uint64_t seed, double base) {
  const paths::GridSpec grid{length, dt * static_cast<double>(length)};
  const auto z = paths::simulate_rbergomi(grid, paths::RBergomiParams::from_hurst(hurst, eta), 1, seed);
  RealizedVolSeries s{symbol, {}};
  const std::chrono::sys_days start = std::chrono::year(2000) / std::chrono::January / 3;
  for (std::size_t i = 0; i < length; ++i) {
    const std::chrono::year_month_day ymd(start + std::chrono::days(static_cast<long>(i)));
    std::ostringstream date;
    date << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
         << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << static_cast<unsigned>(ymd.day());
    s.observations.push_back({date.str(), base * std::exp(z[0].values[i])});
  }
  return s;
}

void write_report_csv(std::ostream& out, const CalibrationReport& report) {
  out << "symbol,window_start,start_date,end_date,cnn_h,reference_h\n";
  for (const auto& w : report.windows) {
    out << w.symbol << ',' << w.begin << ',' << w.start_date << ',' << w.end_date << ','
        << io::format_double(w.cnn_h) << ',' << io::format_double(w.reference_h) << '\n';
  }
}

void write_report_summary(std::ostream& out, const CalibrationReport& report) {
  out << std::left << std::setw(12) << "symbol" << std::right << std::setw(9) << "windows"
      << std::setw(14) << "mean CNN H" << std::setw(14) << "mean ref H" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& s : report.symbols) {
    out << std::left << std::setw(12) << s.symbol << std::right << std::setw(9) << s.windows
        << std::setw(14) << s.mean_cnn_h << std::setw(14) << s.mean_reference_h << '\n';
  }
  out << std::scientific << std::setprecision(3);
  out << "RMSE (CNN vs reference): " << report.rmse << '\n';
  out << "std of differences:      " << report.std_difference << '\n';
  out << std::defaultfloat;
  if (!report.skipped.empty()) {
    out << "skipped windows: " << report.skipped.size() << '\n';
    for (const auto& s : report.skipped) out << "  " << s << '\n';
  }
}

}  // namespace roughcalib::calib

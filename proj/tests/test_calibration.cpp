#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "roughcalib/calib/calibration.hpp"
#include "roughcalib/error.hpp"
#include "roughcalib/nn/network.hpp"

using namespace roughcalib;
using namespace roughcalib::calib;

namespace {

std::string two_symbol_csv(std::size_t rows) {
  std::ostringstream out;
  out << "date,symbol,rv\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const int day = static_cast<int>(i % 28) + 1;
    const int month = static_cast<int>((i / 28) % 12) + 1;
    const int year = 2001 + static_cast<int>(i / 336);
    char date[16];
    std::snprintf(date, sizeof date, "%04d-%02d-%02d", year, month, day);
    out << date << ",AAA," << 1e-4 * (1.0 + 0.01 * static_cast<double>(i % 7)) << '\n';
    out << date << ",BBB," << 2e-4 * (1.0 + 0.02 * static_cast<double>(i % 5)) << '\n';
  }
  return out.str();
}

// Dense-only net whose output is a fixed linear functional of the input.
nn::NetworkConfig linear_config(std::size_t n) {
  nn::NetworkConfig c;
  c.input_length = n;
  c.layers = {nn::FlattenSpec{}, nn::DenseSpec{1}};
  return c;
}

}  // namespace

TEST_CASE("parse two symbols") {
  std::istringstream in(two_symbol_csv(200));
  const auto file = parse_realized_vol_csv(in);
  REQUIRE(file.series.size() == 2);
  CHECK(file.series[0].symbol == "AAA");
  CHECK(file.series[0].observations.size() == 200);
  CHECK(file.series[1].observations.size() == 200);
  CHECK(file.dropped_nonpositive == 0);
}

TEST_CASE("non-positive rv rows are dropped and counted") {
  std::istringstream in("date,symbol,rv\n2020-01-02,X,0.5\n2020-01-03,X,0\n2020-01-06,X,-1\n2020-01-07,X,0.2\n");
  const auto file = parse_realized_vol_csv(in);
  CHECK(file.dropped_nonpositive == 2);
  CHECK(file.series.at(0).observations.size() == 2);
}

TEST_CASE("shuffled dates are re-sorted") {
  std::istringstream in("date,symbol,rv\n2020-03-01,X,3\n2020-01-01,X,1\n2020-02-01,X,2\n");
  const auto file = parse_realized_vol_csv(in);
  const auto& obs = file.series.at(0).observations;
  CHECK(obs[0].date == "2020-01-01");
  CHECK(obs[1].rv == 2.0);
  CHECK(obs[2].date == "2020-03-01");
}

TEST_CASE("parse errors carry line numbers") {
  std::istringstream no_header("2020-01-01,X,1\n");
  CHECK_THROWS_AS(parse_realized_vol_csv(no_header), ParseError);

  std::istringstream bad_number("date,symbol,rv\n2020-01-01,X,1\n2020-01-02,X,abc\n");
  try {
    parse_realized_vol_csv(bad_number);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream bad_date("date,symbol,rv\n2020-02-30,X,1\n");
  CHECK_THROWS_AS(parse_realized_vol_csv(bad_date), ParseError);
  std::istringstream extra_field("date,symbol,rv\n2020-02-03,X,1,2\n");
  CHECK_THROWS_AS(parse_realized_vol_csv(extra_field), ParseError);
}

TEST_CASE("CSV write/parse round trip") {
  const auto s = synthetic_series("SYN", 0.1, 1.0, 30, 0.01, 4);
  std::stringstream buffer;
  write_realized_vol_csv(buffer, {s});
  const auto back = parse_realized_vol_csv(buffer);
  REQUIRE(back.series.size() == 1);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(back.series[0].observations[i].date == s.observations[i].date);
    CHECK(back.series[0].observations[i].rv == s.observations[i].rv);
  }
}

TEST_CASE("windowing") {
  const auto w = make_windows(200, {});
  REQUIRE(w.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(w[i].begin == 10 * i);
    CHECK(w[i].length == 100);
  }
  CHECK(make_windows(100, {100, 100, 10}).size() == 1);
  CHECK_THROWS_AS(make_windows(150, {}), ConfigError);
  // Most recent observations are used.
  CHECK(make_windows(260, {}).front().begin == 60);
  // stride == window tiles the segment exactly.
  const auto tiles = make_windows(300, {200, 50, 50});
  REQUIRE(tiles.size() == 4);
  for (std::size_t i = 1; i < tiles.size(); ++i) CHECK(tiles[i].begin == tiles[i - 1].begin + 50);
  CHECK(tiles.back().begin + tiles.back().length == 300);
}

TEST_CASE("preprocessing") {
  const auto flat = preprocess_window({2.0, 2.0, 2.0});
  for (double v : flat) CHECK(v == 0.0);
  const auto x = preprocess_window({1.0, std::exp(2.0), std::exp(4.0)});
  CHECK(x[0] == 0.0);
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x[2] == doctest::Approx(4.0).epsilon(1e-14));
  const auto half = preprocess_window({1.0, std::exp(2.0)}, true);
  CHECK(half[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(preprocess_window({1.0, 0.0}), ParameterError);

  const std::vector<double> rv{0.3, 0.7, 0.2, 0.9};
  std::vector<double> scaled;
  for (double v : rv) scaled.push_back(17.0 * v);
  const auto a = preprocess_window(rv);
  const auto b = preprocess_window(scaled);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("calibrate report structure and statistics") {
  std::vector<RealizedVolSeries> series;
  series.push_back(synthetic_series("A", 0.1, 1.0, 220, 0.01, 1));
  series.push_back(synthetic_series("B", 0.3, 1.0, 200, 0.01, 2));
  const auto config = nn::hurst_cnn_config(100);
  const auto state = nn::initialize_model(config, 7, {});
  const auto report = calibrate(config, state, series, {});
  CHECK(report.windows.size() == 22);
  REQUIRE(report.symbols.size() == 2);
  CHECK(report.symbols[0].windows == 11);
  CHECK(report.windows.front().begin == 20);

  double mean = 0.0, sq = 0.0;
  for (const auto& w : report.windows) {
    mean += w.cnn_h - w.reference_h;
    sq += (w.cnn_h - w.reference_h) * (w.cnn_h - w.reference_h);
  }
  mean /= 22.0;
  CHECK(report.rmse == doctest::Approx(std::sqrt(sq / 22.0)).epsilon(1e-12));
  CHECK(report.mean_difference == doctest::Approx(mean).epsilon(1e-12));
  CHECK(std::abs(report.rmse * report.rmse - (report.mean_difference * report.mean_difference +
                                              report.std_difference * report.std_difference)) < 1e-12);

  std::ostringstream csv, summary;
  write_report_csv(csv, report);
  write_report_summary(summary, report);
  CHECK(csv.str().rfind("symbol,window_start,start_date,end_date,cnn_h,reference_h\n", 0) == 0);
  CHECK(summary.str().find("RMSE") != std::string::npos);

  CHECK_THROWS_AS(calibrate(nn::hurst_cnn_config(50), nn::initialize_model(nn::hurst_cnn_config(50), 1, {}),
                            series, {}),
                  ConfigError);
}

TEST_CASE("calibration with CNN forced equal to LS gives zero error") {
  // A zero network outputs its bias; set it to the LS value of a single window.
  const auto s = synthetic_series("Z", 0.2, 1.0, 100, 0.01, 9);
  std::vector<double> rv;
  for (const auto& o : s.observations) rv.push_back(o.rv);
  const double ls = est::ls_estimate_h(preprocess_window(rv), est::LsConfig{}).h;

  const auto config = linear_config(100);
  auto state = nn::initialize_model(config, 1, {});
  for (auto& p : state.params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) p.value[i] = 0.0;
  }
  state.params.back().value[0] = ls;
  const auto report = calibrate(config, state, {s}, {{100, 100, 10}, false, {}});
  REQUIRE(report.windows.size() == 1);
  CHECK(report.rmse == 0.0);
  CHECK(report.std_difference == 0.0);
}

TEST_CASE("degenerate windows are skipped and reported") {
  RealizedVolSeries flat{"FLAT", {}};
  const auto s = synthetic_series("FLAT", 0.2, 1.0, 100, 0.01, 1);
  for (const auto& o : s.observations) flat.observations.push_back({o.date, 1e-4});
  const auto config = nn::hurst_cnn_config(100);
  const auto report = calibrate(config, nn::initialize_model(config, 1, {}), {flat}, {{100, 100, 10}, false, {}});
  CHECK(report.windows.empty());
  CHECK(report.skipped.size() == 1);
}

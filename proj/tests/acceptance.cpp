// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "roughcalib/calib/calibration.hpp"
#include "roughcalib/data/dataset.hpp"
#include "roughcalib/est/estimators.hpp"
#include "roughcalib/harness/experiments.hpp"
#include "roughcalib/nn/gradcheck.hpp"
#include "roughcalib/nn/model_io.hpp"
#include "roughcalib/paths/covariance.hpp"
#include "roughcalib/paths/simulate.hpp"
#include "roughcalib/random.hpp"

using namespace roughcalib;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Rows of a results CSV keyed by header name; '#' lines are skipped.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("missing " + file.string());
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string file_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

harness::ExperimentConfig base_config(harness::Command command, const fs::path& out) {
  harness::ExperimentConfig c;
  c.command = command;
  c.seed = kSeed;
  c.out_dir = out;
  return c;
}

std::ostringstream g_log;  // harness progress, shown only on failure

// 1. Gradient oracle.
Verdict gradient_oracle() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t params = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto net = nn::random_small_config(derive_seed(kSeed, 1, k), 1000);
    const auto state = nn::initialize_model(net, derive_seed(kSeed, 2, k));
    RandomStream rng(derive_seed(kSeed, 3, k));
    std::vector<nn::Tensor> xs, ys;
    for (int b = 0; b < 2; ++b) {
      std::vector<double> x(net.input_length), y(net.output_dim());
      rng.fill_normal(x);
      rng.fill_normal(y);
      xs.push_back(nn::Tensor::vector(x));
      ys.push_back(nn::Tensor::vector(y));
    }
    const auto check = nn::check_gradients(net, state, xs, ys, 1e-6);
    worst = std::max(worst, check.max_relative_error);
    params += check.parameters;
    if (check.parameters > 1000) return {false, "network exceeds 1000 parameters"};
  }
  const double secs = elapsed(start);
  return {worst <= 1e-4 && secs <= 60.0,
          std::to_string(params) + " parameters, max relative error " + fmt("%.2e", worst) + ", " +
              fmt("%.1f", secs) + " s"};
}

// 2. Covariance correctness.
Verdict covariance_correctness() {
  const auto start = std::chrono::steady_clock::now();
  RandomStream rng(derive_seed(kSeed, 4));
  double worst_quad = 0.0, worst_diag = 0.0, worst_chol = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double alpha = -0.5 + 0.5 * rng.uniform_open();
    const double eta = 3.0 * rng.uniform_open();
    const double s = rng.uniform_open();
    const double t = rng.uniform_open();
    const paths::RBergomiParams p{alpha, eta, false};
    const double got = paths::rbergomi_covariance(s, t, p);
    const double want = oracle::rbergomi_covariance_quadrature(s, t, alpha, eta);
    worst_quad = std::max(worst_quad, std::abs(got - want) / std::max(1.0, std::abs(want)));
    const double diag = paths::rbergomi_covariance(t, t, p);
    const double exact = eta * eta * std::pow(t, 2.0 * alpha + 1.0);
    worst_diag = std::max(worst_diag, std::abs(diag - exact) / exact);
    if (k % 10 == 0) {
      const paths::GridSpec grid{100, 1.0};
      const auto m = paths::rbergomi_covariance(grid, p);
      const auto f = paths::cholesky(m);
      worst_chol = std::max(worst_chol, paths::relative_frobenius_error(f.reconstruct(), m));
    }
  }
  const double secs = elapsed(start);
  return {worst_quad <= 1e-8 && worst_diag <= 1e-12 && worst_chol <= 1e-10 && secs <= 60.0,
          "quadrature " + fmt("%.1e", worst_quad) + ", diagonal " + fmt("%.1e", worst_diag) +
              ", reconstruction " + fmt("%.1e", worst_chol) + ", " + fmt("%.1f", secs) + " s"};
}

// 3. Monte Carlo marginals.
Verdict monte_carlo_marginals(std::vector<double>* finals_out) {
  const auto start = std::chrono::steady_clock::now();
  const paths::GridSpec grid{100, 1.0};
  const std::size_t count = 10000;
  const auto z = paths::simulate_rbergomi(grid, {-0.4, 1.0, false}, count, derive_seed(kSeed, 5));
  std::size_t outside = 0;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    double sum = 0.0;
    for (const auto& p : z) sum += p.values[i];
    const double mean = sum / static_cast<double>(count);
    const double se = std::sqrt(std::pow(grid.time(i), 0.2) / static_cast<double>(count));
    worst_z = std::max(worst_z, std::abs(mean) / se);
    if (std::abs(mean) > 3.0 * se) ++outside;
  }
  std::vector<double> finals;
  for (const auto& p : z) finals.push_back(p.values.back());
  const double var = oracle::sample_variance(finals);
  const auto band = oracle::variance_band_99(count, 1.0);
  if (finals_out) *finals_out = finals;
  const double secs = elapsed(start);
  return {outside == 0 && var > band.low && var < band.high && secs <= 120.0,
          "max |mean|/SE " + fmt("%.2f", worst_z) + ", final variance " + fmt("%.4f", var) + " in [" +
              fmt("%.4f", band.low) + ", " + fmt("%.4f", band.high) + "], " + fmt("%.1f", secs) + " s"};
}

// 4. LS baseline band.
Verdict ls_baseline() {
  const auto start = std::chrono::steady_clock::now();
  data::DatasetSpec spec;
  spec.total_paths = 500;
  spec.seed = derive_seed(kSeed, 6);
  const auto ds = data::build_dataset(spec);
  std::vector<double> est, truth;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    est.push_back(est::ls_estimate_h(ds.inputs[i].values, est::LsConfig::for_grid(ds.grid)).h);
    truth.push_back(ds.targets[i][0]);
  }
  const double r = est::rmse(est, truth);
  const double secs = elapsed(start);
  return {r >= 0.15 && r <= 0.27 && secs <= 60.0,
          "LS RMSE " + fmt("%.4f", r) + " (band [0.15, 0.27]), " + fmt("%.1f", secs) + " s"};
}

// 5. Desk-scale CNN training through the `train` command.
Verdict cnn_training(const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = base_config(harness::Command::train, dir);
  harness::run_experiment(cfg, g_log);
  const auto row = read_csv(dir / "results.csv").at(0);
  const double cnn = std::stod(row.at("cnn_rmse"));
  const double ls = std::stod(row.at("ls_rmse"));
  const auto curve = read_csv(dir / "loss_curve.csv");
  const bool decreasing = std::stod(curve.back().at("train_mse")) < std::stod(curve.front().at("train_mse"));
  const double secs = elapsed(start);
  return {cnn <= 0.05 && ls >= 3.0 * cnn && decreasing && secs <= 1800.0,
          "CNN RMSE " + fmt("%.4f", cnn) + " (<= 0.05), LS RMSE " + fmt("%.4f", ls) + ", ratio " +
              fmt("%.2f", ls / cnn) + " (>= 3), loss decreasing " + (decreasing ? "yes" : "no") + ", " +
              fmt("%.0f", secs) + " s"};
}

// 6. Beta sampler.
Verdict beta_sampler() {
  const auto hs = data::sample_h(data::HSampler::beta(), 10000, derive_seed(kSeed, 7));
  const double d = oracle::ks_statistic(hs, [](double x) {
    return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : 1.0 - std::pow(1.0 - x, 9.0);
  });
  const double crit = oracle::ks_critical_1pct(hs.size());
  const double mean = oracle::mean(hs);
  const double se = std::sqrt(9.0 / 1100.0 / 10000.0);
  return {d < crit && std::abs(mean - 0.1) <= 3.0 * se,
          "KS " + fmt("%.4f", d) + " < " + fmt("%.4f", crit) + ", mean " + fmt("%.4f", mean) + " (0.1 +- " +
              fmt("%.4f", 3.0 * se) + ")"};
}

// 7. OU robustness with the criterion-5 model through the `robust-ou` command.
Verdict ou_robustness(const fs::path& model, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = base_config(harness::Command::robust_ou, dir);
  cfg.model_file = model;
  harness::run_experiment(cfg, g_log);
  const auto rows = read_csv(dir / "results.csv");
  std::map<double, std::pair<double, double>> by_c;
  for (const auto& r : rows) by_c[std::stod(r.at("c"))] = {std::stod(r.at("cnn_model")), std::stod(r.at("ls"))};
  const auto [cnn_hi, ls_hi] = by_c.at(3.0);
  const auto [cnn_lo, ls_lo] = by_c.at(0.3);
  const auto in_band = [](double v) { return v >= 0.35 && v <= 0.55; };
  const double secs = elapsed(start);
  return {in_band(cnn_hi) && in_band(cnn_lo) && ls_hi < 0.35 && ls_lo > 0.55 && secs <= 300.0,
          "c=3: CNN " + fmt("%.3f", cnn_hi) + ", LS " + fmt("%.3f", ls_hi) + "; c=0.3: CNN " +
              fmt("%.3f", cnn_lo) + ", LS " + fmt("%.3f", ls_lo) + "; " + fmt("%.1f", secs) + " s"};
}

// 8. LS exactness and the report's bias-variance identity.
Verdict ls_exactness(const calib::CalibrationReport* report) {
  double worst = 0.0;
  est::LsConfig cfg;
  for (double h : {0.03, 0.1, 0.27, 0.5, 0.81}) {
    std::vector<std::vector<double>> m(cfg.q_grid.size(), std::vector<double>(cfg.lag_grid.size()));
    for (std::size_t k = 0; k < cfg.q_grid.size(); ++k) {
      for (std::size_t l = 0; l < cfg.lag_grid.size(); ++l) {
        m[k][l] = 1.7 * std::pow(cfg.lag_grid[l] * cfg.dt, cfg.q_grid[k] * h);
      }
    }
    worst = std::max(worst, std::abs(est::ls_estimate_from_moments(m, cfg).h - h));
  }
  // A linear path has m(q, lag) = (s lag)^q exactly, i.e. H = 1.
  std::vector<double> line(100);
  for (std::size_t i = 0; i < line.size(); ++i) line[i] = 0.3 * static_cast<double>(i);
  worst = std::max(worst, std::abs(est::ls_estimate_h(line, cfg).h - 1.0));

  double identity = 0.0;
  if (report) {
    identity = std::abs(report->rmse * report->rmse -
                        (report->mean_difference * report->mean_difference +
                         report->std_difference * report->std_difference));
  }
  RandomStream rng(derive_seed(kSeed, 8));
  std::vector<double> a(1000), b(1000);
  rng.fill_normal(a);
  rng.fill_normal(b);
  const auto st = est::error_stats(a, b);
  identity = std::max(identity, std::abs(st.rmse * st.rmse - (st.mean_difference * st.mean_difference +
                                                              st.std_difference * st.std_difference)));
  return {worst <= 1e-12 && identity <= 1e-12 && report != nullptr,
          "max |H_hat - H| " + fmt("%.1e", worst) + ", identity residual " + fmt("%.1e", identity)};
}

// 9. Calibration pipeline on synthetic market data through the `calibrate` command.
Verdict calibration_pipeline(const fs::path& model, const fs::path& dir, calib::CalibrationReport* report_out) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(dir);
  const std::map<std::string, double> truth{{"SYN05", 0.05}, {"SYN10", 0.1}, {"SYN20", 0.2}};
  std::vector<calib::RealizedVolSeries> series;
  std::uint64_t k = 0;
  for (const auto& [symbol, h] : truth) {
    series.push_back(calib::synthetic_series(symbol, h, 1.0, 250, 0.01, derive_seed(kSeed, 9, k++)));
  }
  const fs::path csv = dir / "market.csv";
  {
    std::ofstream out(csv);
    calib::write_realized_vol_csv(out, series);
  }
  auto cfg = base_config(harness::Command::calibrate, dir / "run");
  cfg.model_file = model;
  cfg.data_file = csv;
  harness::run_experiment(cfg, g_log);

  // Recompute the report in-process as well so its statistics can be checked.
  const auto loaded = nn::load_model(model);
  const auto parsed = calib::parse_realized_vol_csv(csv);
  *report_out = calib::calibrate(loaded.config, loaded.state, parsed.series, {});

  bool ok = true;
  std::string detail;
  double rmse = 0.0;
  for (const auto& row : read_csv(dir / "run" / "results.csv")) {
    if (row.at("symbol") == "ALL") {
      rmse = std::stod(row.at("mean_cnn_h").substr(std::string("rmse=").size()));
      continue;
    }
    const double mean = std::stod(row.at("mean_cnn_h"));
    const double h = truth.at(row.at("symbol"));
    ok = ok && std::abs(mean - h) <= 0.05;
    detail += row.at("symbol") + " CNN " + fmt("%.3f", mean) + " (true " + fmt("%.2f", h) + "), ";
  }
  ok = ok && std::abs(rmse - report_out->rmse) < 1e-15;
  const double secs = elapsed(start);
  return {ok && rmse <= 0.25 && secs <= 300.0,
          detail + "CNN-vs-LS RMSE " + fmt("%.4f", rmse) + ", " + fmt("%.1f", secs) + " s"};
}

// 10. Determinism and persistence.
Verdict determinism(const fs::path& model, const fs::path& dir, const std::vector<double>& finals) {
  bool ok = true;
  std::vector<std::string> notes;

  std::vector<double> again;
  monte_carlo_marginals(&again);
  const bool mc_same = again == finals;
  ok = ok && mc_same;
  notes.push_back(std::string("MC rerun ") + (mc_same ? "identical" : "DIFFERENT"));

  std::string first;
  for (int run = 0; run < 2; ++run) {
    auto cfg = base_config(harness::Command::train, dir / ("train" + std::to_string(run)));
    cfg.paths_per_value = 60;
    cfg.epochs = 3;
    harness::run_experiment(cfg, g_log);
    const std::string bytes = file_bytes(cfg.out_dir / "results.csv") + file_bytes(cfg.out_dir / "model.bin") +
                              file_bytes(cfg.out_dir / "loss_curve.csv");
    if (run == 0) {
      first = bytes;
    } else {
      const bool same = bytes == first;
      ok = ok && same;
      notes.push_back(std::string("small train rerun ") + (same ? "byte-identical" : "DIFFERENT"));
    }
  }

  const auto loaded = nn::load_model(model);
  const fs::path copy = dir / "copy.bin";
  nn::save_model(copy, loaded.config, loaded.state);
  const auto reloaded = nn::load_model(copy);
  const bool file_same = file_bytes(copy) == file_bytes(model);
  data::DatasetSpec spec;
  spec.total_paths = 200;
  spec.seed = derive_seed(kSeed, 10);
  const auto ds = data::build_dataset(spec);
  std::vector<nn::Tensor> inputs;
  for (const auto& p : ds.inputs) inputs.push_back(nn::Tensor::vector(p.values));
  const bool preds_same = nn::predict_all(loaded.config, loaded.state, inputs) ==
                          nn::predict_all(reloaded.config, reloaded.state, inputs);
  ok = ok && file_same && preds_same;
  notes.push_back(std::string("save/load ") + (file_same && preds_same ? "bit-exact" : "MISMATCH"));

  std::string detail;
  for (std::size_t i = 0; i < notes.size(); ++i) detail += (i ? ", " : "") + notes[i];
  return {ok, detail};
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / ("roughcalib-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(root);
  int failures = 0;
  const auto report = [&](int n, const char* name, const std::function<Verdict()>& run) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << "criterion " << n << " (" << name << "): " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail
              << std::endl;
  };

  std::vector<double> finals;
  calib::CalibrationReport calibration;
  bool have_calibration = false;
  const fs::path model = root / "train" / "model.bin";

  report(1, "gradient oracle", gradient_oracle);
  report(2, "covariance correctness", covariance_correctness);
  report(3, "Monte Carlo marginals", [&] { return monte_carlo_marginals(&finals); });
  report(4, "LS baseline band", ls_baseline);
  report(5, "desk-scale CNN training", [&] { return cnn_training(root / "train"); });
  report(6, "Beta sampler", beta_sampler);
  report(7, "OU robustness", [&] { return ou_robustness(model, root / "ou"); });
  report(9, "calibration pipeline", [&] {
    auto v = calibration_pipeline(model, root / "calibrate", &calibration);
    have_calibration = true;
    return v;
  });
  report(8, "LS exactness and bias-variance identity",
         [&] { return ls_exactness(have_calibration ? &calibration : nullptr); });
  report(10, "determinism and persistence", [&] { return determinism(model, root / "determinism", finals); });

  std::error_code ec;
  fs::remove_all(root, ec);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  if (failures > 0) {
    std::cout << "--- harness log ---\n" << g_log.str();
  }
  return failures == 0 ? 0 : 1;
}

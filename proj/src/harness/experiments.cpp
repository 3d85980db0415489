#include "roughcalib/harness/experiments.hpp"

#include <sys/utsname.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include "roughcalib/binary_io.hpp"
#include "roughcalib/calib/calibration.hpp"
#include "roughcalib/data/dataset.hpp"
#include "roughcalib/error.hpp"
#include "roughcalib/est/estimators.hpp"
#include "roughcalib/nn/gradcheck.hpp"
#include "roughcalib/nn/model_io.hpp"
#include "roughcalib/nn/trainer.hpp"
#include "roughcalib/paths/simulate.hpp"
#include "roughcalib/random.hpp"

namespace roughcalib::harness {

namespace fs = std::filesystem;

namespace {

enum SeedStream : std::uint64_t { kData = 1, kSplit = 2, kTrain = 3, kOu = 4, kGradcheck = 5, kEval = 6 };

template <class F>
auto in_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
  }

  fs::path add(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }

  void rollback() noexcept {
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(const fs::path& file, const std::string& comment = "") const {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
    if (!comment.empty()) out << "# " << comment << '\n';
    const auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    if (!out) throw std::runtime_error("failed writing '" + file.string() + "'");
  }
};

std::string num(double v) { return io::format_double(v); }

std::string hardware_note() {
  utsname u{};
  std::string system = "unknown";
  if (uname(&u) == 0) system = std::string(u.sysname) + " " + u.release + " " + u.machine;
  return "hardware: " + system + ", " + std::to_string(std::thread::hardware_concurrency()) +
         " hardware threads, single-threaded CPU run";
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Timing {
  Csv csv{{"run", "stage", "seconds"}, {}};
  void add(const std::string& run, const std::string& stage, double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", seconds);
    csv.rows.push_back({run, stage, buf});
  }
};

est::LsConfig ls_config(const ExperimentConfig& cfg) {
  est::LsConfig ls;
  ls.q_grid = cfg.q_grid;
  ls.lag_grid.clear();
  for (std::size_t l = 1; l <= cfg.max_lag; ++l) ls.lag_grid.push_back(l);
  ls.dt = cfg.horizon / static_cast<double>(cfg.input_length);
  return ls;
}

data::DatasetSpec dataset_spec(const ExperimentConfig& cfg, const std::string& sampler,
                               const std::string& eta, const std::string& model, bool label_eta,
                               std::uint64_t seed) {
  data::DatasetSpec spec;
  spec.sampler = data::sampler_from_name(sampler);
  spec.eta = eta == "random" ? data::EtaPolicy::uniform(cfg.eta_low, cfg.eta_high)
                             : data::EtaPolicy::fixed(io::parse_double(eta));
  spec.model = model == "fbm" ? data::PathModel::fbm : data::PathModel::rbergomi;
  spec.grid = {cfg.input_length, cfg.horizon};
  const std::size_t values = spec.sampler.is_fixed() ? spec.sampler.fixed_values().size() : 5;
  spec.total_paths = values * cfg.paths_per_value;
  spec.label_eta = label_eta;
  spec.include_drift = cfg.drift;
  spec.seed = seed;
  return spec;
}

data::LabeledDataset make_dataset(const data::DatasetSpec& spec, std::uint64_t split_seed,
                                  std::ostream& log) {
  return in_stage("simulate", [&] {
    log << "simulating " << spec.total_paths << " paths (" << spec.describe() << ")\n";
    auto ds = data::build_dataset(spec);
    data::split_dataset(ds, data::SplitSizes::proportional(ds.size()), split_seed);
    return ds;
  });
}

nn::TrainOptions train_options(const ExperimentConfig& cfg, std::uint64_t seed) {
  nn::TrainOptions o;
  o.epochs = cfg.epochs;
  o.batch_size = cfg.batch_size;
  o.seed = seed;
  o.adam.learning_rate = cfg.learning_rate;
  o.standardize_targets = cfg.standardize;
  return o;
}

struct Evaluation {
  double cnn_rmse = 0.0;
  std::vector<double> cnn_component_rmse;
  double ls_rmse = 0.0;
  std::vector<double> ls_component_rmse;
  double test_seconds = 0.0;
  double ls_seconds = 0.0;
};

// CNN and LS on the given rows; label component 1 (if any) is compared with the LS eta.
Evaluation evaluate(const nn::NetworkConfig& net, const nn::ModelState& state,
                    const data::LabeledDataset& ds, const std::vector<std::size_t>& rows,
                    const est::LsConfig& ls) {
  Evaluation ev;
  const std::size_t dim = ds.label_dim;
  std::vector<std::vector<double>> cnn(dim), ls_est(dim), truth(dim);
  in_stage("evaluate", [&] {
    const auto set = est::to_sample_set(ds, rows);
    Stopwatch watch;
    const auto predictions = nn::predict_all(net, state, set.inputs);
    ev.test_seconds = watch.seconds();
    ev.cnn_rmse = nn::rmse(predictions, set.targets);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        cnn[d].push_back(predictions[i][d]);
        truth[d].push_back(set.targets[i][d]);
      }
    }
    return 0;
  });
  in_stage("least-squares", [&] {
    Stopwatch watch;
    for (std::size_t i : rows) {
      const auto e = est::ls_estimate_h(ds.inputs[i].values, ls);
      ls_est[0].push_back(e.h);
      if (dim > 1) ls_est[1].push_back(e.eta.value_or(std::nan("")));
    }
    ev.ls_seconds = watch.seconds();
    return 0;
  });
  double cnn_sq = 0.0, ls_sq = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    ev.cnn_component_rmse.push_back(est::rmse(cnn[d], truth[d]));
    ev.ls_component_rmse.push_back(est::rmse(ls_est[d], truth[d]));
    cnn_sq += ev.cnn_component_rmse.back() * ev.cnn_component_rmse.back();
    ls_sq += ev.ls_component_rmse.back() * ev.ls_component_rmse.back();
  }
  ev.ls_rmse = std::sqrt(ls_sq / static_cast<double>(dim));
  ev.cnn_rmse = std::sqrt(cnn_sq / static_cast<double>(dim));
  return ev;
}

struct TrainedRun {
  nn::NetworkConfig net;
  nn::ModelState state;
  nn::TrainReport report;
  Evaluation eval;
};

TrainedRun train_and_evaluate(const ExperimentConfig& cfg, const data::LabeledDataset& ds,
                              std::uint64_t seed, std::ostream& log) {
  TrainedRun run;
  run.net = nn::hurst_cnn_config(ds.grid.n, ds.label_dim);
  const auto train_set = est::to_sample_set(ds, ds.split.train);
  const auto validation = est::to_sample_set(ds, ds.split.validation);
  in_stage("train", [&] {
    log << "training on " << train_set.size() << " paths, " << cfg.epochs << " epochs\n";
    auto result = nn::train(run.net, train_set, validation, {}, train_options(cfg, seed));
    run.state = std::move(result.state);
    run.report = std::move(result.report);
    return 0;
  });
  for (std::size_t e = 0; e < run.report.train_mse.size(); ++e) {
    log << "  epoch " << e + 1 << ": train " << num(run.report.train_mse[e]) << ", validation "
        << num(run.report.validation_mse[e]) << '\n';
  }
  run.eval = evaluate(run.net, run.state, ds, ds.split.test, ls_config(cfg));
  run.report.test_seconds = run.eval.test_seconds;
  run.report.test_rmse = run.eval.cnn_rmse;
  log << "test RMSE: CNN " << num(run.eval.cnn_rmse) << ", LS " << num(run.eval.ls_rmse) << '\n';
  return run;
}

void write_loss_curve(const fs::path& file, const nn::TrainReport& report) {
  Csv csv{{"epoch", "train_mse", "val_mse"}, {}};
  for (std::size_t e = 0; e < report.train_mse.size(); ++e) {
    csv.rows.push_back({std::to_string(e + 1), num(report.train_mse[e]), num(report.validation_mse[e])});
  }
  csv.write(file);
}

void record_timing(Timing& timing, const std::string& run, const TrainedRun& r) {
  timing.add(run, "train", r.report.train_seconds);
  timing.add(run, "test", r.eval.test_seconds);
  timing.add(run, "least-squares", r.eval.ls_seconds);
}

std::string label_for(double v) {
  std::string s = num(v);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

nn::LoadedModel load_required_model(const ExperimentConfig& cfg) {
  if (!cfg.model_file) throw ConfigError("this command needs --model FILE");
  return in_stage("load-model", [&] { return nn::load_model(*cfg.model_file); });
}

void run_gen_data(const ExperimentConfig& cfg, Outputs& out, std::ostream& log) {
  const std::uint64_t seed = *cfg.seed;
  const auto ds = make_dataset(
      dataset_spec(cfg, cfg.sampler, cfg.eta, cfg.model, false, derive_seed(seed, kData, 0)),
      derive_seed(seed, kSplit, 0), log);
  in_stage("write", [&] {
    data::save_dataset(out.add("dataset.bin"), ds);
    Csv csv{{"paths", "input_length", "sampler", "eta", "model", "train", "test", "validation", "digest"},
            {{std::to_string(ds.size()), std::to_string(ds.grid.n), cfg.sampler, cfg.eta, cfg.model,
              std::to_string(ds.split.train.size()), std::to_string(ds.split.test.size()),
              std::to_string(ds.split.validation.size()), std::to_string(ds.config_digest)}}};
    csv.write(out.add("results.csv"));
    return 0;
  });
}

data::LabeledDataset dataset_for_training(const ExperimentConfig& cfg, std::ostream& log) {
  const std::uint64_t seed = *cfg.seed;
  if (cfg.data_file) {
    return in_stage("load-data", [&] {
      auto ds = data::load_dataset(*cfg.data_file);
      if (ds.split.train.empty()) {
        data::split_dataset(ds, data::SplitSizes::proportional(ds.size()), derive_seed(seed, kSplit, 0));
      }
      log << "loaded " << ds.size() << " paths from " << cfg.data_file->string() << '\n';
      return ds;
    });
  }
  return make_dataset(
      dataset_spec(cfg, cfg.sampler, cfg.eta, cfg.model, false, derive_seed(seed, kData, 0)),
      derive_seed(seed, kSplit, 0), log);
}

void run_train(const ExperimentConfig& cfg, Outputs& out, Timing& timing, std::ostream& log) {
  const auto ds = dataset_for_training(cfg, log);
  const auto run = train_and_evaluate(cfg, ds, derive_seed(*cfg.seed, kTrain, 0), log);
  in_stage("write", [&] {
    nn::save_model(out.add("model.bin"), run.net, run.state);
    write_loss_curve(out.add("loss_curve.csv"), run.report);
    Csv csv{{"input_length", "sampler", "eta", "model", "cnn_rmse", "ls_rmse"},
            {{std::to_string(ds.grid.n), cfg.data_file ? "file" : cfg.sampler, cfg.data_file ? "file" : cfg.eta,
              cfg.model, num(run.eval.cnn_rmse), num(run.eval.ls_rmse)}}};
    csv.write(out.add("results.csv"));
    return 0;
  });
  record_timing(timing, "train", run);
}

void run_eval(const ExperimentConfig& cfg, Outputs& out, Timing& timing, std::ostream& log) {
  const auto model = load_required_model(cfg);
  data::LabeledDataset ds;
  std::vector<std::size_t> rows;
  if (cfg.data_file) {
    ds = in_stage("load-data", [&] { return data::load_dataset(*cfg.data_file); });
    rows = ds.split.test;
  } else {
    auto spec = dataset_spec(cfg, cfg.sampler, cfg.eta, cfg.model, model.config.output_dim() == 2,
                             derive_seed(*cfg.seed, kEval));
    spec.grid.n = model.config.input_length;
    ds = in_stage("simulate", [&] { return data::build_dataset(spec); });
  }
  if (rows.empty()) {
    rows.resize(ds.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }
  if (ds.label_dim != model.config.output_dim()) {
    throw StageError("evaluate", "model outputs " + std::to_string(model.config.output_dim()) +
                                     " values but the data has " + std::to_string(ds.label_dim) + " labels");
  }
  auto ls = ls_config(cfg);
  ls.dt = ds.grid.dt();
  const auto ev = evaluate(model.config, model.state, ds, rows, ls);
  log << "evaluated " << rows.size() << " paths: CNN RMSE " << num(ev.cnn_rmse) << ", LS RMSE "
      << num(ev.ls_rmse) << '\n';
  in_stage("write", [&] {
    Csv csv{{"input_length", "paths", "cnn_rmse", "ls_rmse"},
            {{std::to_string(ds.grid.n), std::to_string(rows.size()), num(ev.cnn_rmse), num(ev.ls_rmse)}}};
    csv.write(out.add("results.csv"));
    return 0;
  });
  timing.add("eval", "test", ev.test_seconds);
  timing.add("eval", "least-squares", ev.ls_seconds);
}

void run_robust_eta(const ExperimentConfig& cfg, Outputs& out, Timing& timing, std::ostream& log) {
  Csv csv{{"eta", "cnn_rmse", "ls_rmse"}, {}};
  for (std::size_t k = 0; k < cfg.eta_values.size(); ++k) {
    const double eta = cfg.eta_values[k];
    log << "eta = " << num(eta) << '\n';
    const auto ds = make_dataset(
        dataset_spec(cfg, cfg.sampler, num(eta), "rbergomi", false, derive_seed(*cfg.seed, kData, k)),
        derive_seed(*cfg.seed, kSplit, k), log);
    const auto run = train_and_evaluate(cfg, ds, derive_seed(*cfg.seed, kTrain, k), log);
    in_stage("write", [&] {
      write_loss_curve(out.add("loss_curve_eta_" + label_for(eta) + ".csv"), run.report);
      return 0;
    });
    csv.rows.push_back({num(eta), num(run.eval.cnn_rmse), num(run.eval.ls_rmse)});
    record_timing(timing, "eta=" + num(eta), run);
  }
  in_stage("write", [&] {
    csv.write(out.add("results.csv"));
    return 0;
  });
}

void run_single_random(const ExperimentConfig& cfg, Outputs& out, Timing& timing, std::ostream& log,
                       bool label_eta) {
  const auto ds = make_dataset(
      dataset_spec(cfg, "beta", "random", "rbergomi", label_eta, derive_seed(*cfg.seed, kData, 0)),
      derive_seed(*cfg.seed, kSplit, 0), log);
  const auto run = train_and_evaluate(cfg, ds, derive_seed(*cfg.seed, kTrain, 0), log);
  in_stage("write", [&] {
    write_loss_curve(out.add("loss_curve.csv"), run.report);
    Csv csv;
    if (label_eta) {
      csv.header = {"sampler", "eta", "cnn_rmse", "cnn_rmse_h", "cnn_rmse_eta", "ls_rmse", "ls_rmse_h", "ls_rmse_eta"};
      csv.rows.push_back({"beta", "random", num(run.eval.cnn_rmse), num(run.eval.cnn_component_rmse[0]),
                          num(run.eval.cnn_component_rmse[1]), num(run.eval.ls_rmse),
                          num(run.eval.ls_component_rmse[0]), num(run.eval.ls_component_rmse[1])});
    } else {
      csv.header = {"sampler", "eta", "cnn_rmse", "ls_rmse"};
      csv.rows.push_back({"beta", "random", num(run.eval.cnn_rmse), num(run.eval.ls_rmse)});
    }
    csv.write(out.add("results.csv"));
    return 0;
  });
  record_timing(timing, label_eta ? "learn-eta" : "random", run);
}

void run_robust_fbm(const ExperimentConfig& cfg, Outputs& out, Timing& timing, std::ostream& log) {
  Csv csv{{"sampling", "cnn_rmse", "ls_rmse"}, {}};
  for (std::size_t k = 0; k < cfg.fbm_samplers.size(); ++k) {
    const auto& sampler = cfg.fbm_samplers[k];
    log << "fBm, sampler " << sampler << '\n';
    const auto ds = make_dataset(
        dataset_spec(cfg, sampler, "1", "fbm", false, derive_seed(*cfg.seed, kData, k)),
        derive_seed(*cfg.seed, kSplit, k), log);
    const auto run = train_and_evaluate(cfg, ds, derive_seed(*cfg.seed, kTrain, k), log);
    in_stage("write", [&] {
      write_loss_curve(out.add("loss_curve_" + sampler + ".csv"), run.report);
      return 0;
    });
    csv.rows.push_back({sampler, num(run.eval.cnn_rmse), num(run.eval.ls_rmse)});
    record_timing(timing, sampler, run);
  }
  in_stage("write", [&] {
    csv.write(out.add("results.csv"));
    return 0;
  });
}

void run_robust_ou(const ExperimentConfig& cfg, Outputs& out, Timing& timing, std::ostream& log) {
  struct Named {
    std::string name;
    nn::NetworkConfig net;
    nn::ModelState state;
  };
  std::vector<Named> models;
  if (cfg.model_file) {
    auto m = load_required_model(cfg);
    models.push_back({"model", std::move(m.config), std::move(m.state)});
  } else {
    for (std::size_t k = 0; k < cfg.ou_samplers.size(); ++k) {
      const auto& sampler = cfg.ou_samplers[k];
      const auto ds = make_dataset(
          dataset_spec(cfg, sampler, cfg.eta, "rbergomi", false, derive_seed(*cfg.seed, kData, k)),
          derive_seed(*cfg.seed, kSplit, k), log);
      auto run = train_and_evaluate(cfg, ds, derive_seed(*cfg.seed, kTrain, k), log);
      in_stage("write", [&] {
        write_loss_curve(out.add("loss_curve_" + sampler + ".csv"), run.report);
        return 0;
      });
      record_timing(timing, sampler, run);
      models.push_back({sampler, std::move(run.net), std::move(run.state)});
    }
  }
  Csv csv{{"c"}, {}};
  for (const auto& m : models) csv.header.push_back("cnn_" + m.name);
  csv.header.push_back("ls");
  const auto ls = ls_config(cfg);
  for (std::size_t k = 0; k < cfg.ou_c.size(); ++k) {
    const paths::OuParams params{cfg.ou_x0, cfg.ou_a, cfg.ou_b, cfg.ou_c[k]};
    const paths::GridSpec grid{cfg.input_length, cfg.horizon};
    const auto ou = in_stage("simulate", [&] {
      return paths::simulate_ou(params, grid, cfg.ou_paths, derive_seed(*cfg.seed, kOu, k));
    });
    std::vector<std::string> row{num(params.c)};
    for (const auto& m : models) {
      double sum = 0.0;
      in_stage("evaluate", [&] {
        for (const auto& p : ou) sum += est::cnn_estimate_h(m.net, m.state, p.values).h;
        return 0;
      });
      row.push_back(num(sum / static_cast<double>(ou.size())));
    }
    double ls_sum = 0.0;
    Stopwatch watch;
    in_stage("least-squares", [&] {
      for (const auto& p : ou) ls_sum += est::ls_estimate_h(p.values, ls).h;
      return 0;
    });
    timing.add("c=" + num(params.c), "least-squares", watch.seconds());
    row.push_back(num(ls_sum / static_cast<double>(ou.size())));
    log << "c = " << num(params.c) << ": mean H";
    for (std::size_t i = 1; i < row.size(); ++i) log << ' ' << csv.header[i] << '=' << row[i];
    log << '\n';
    csv.rows.push_back(std::move(row));
  }
  in_stage("write", [&] {
    csv.write(out.add("results.csv"));
    return 0;
  });
}

void run_calibrate(const ExperimentConfig& cfg, Outputs& out, Timing& timing, std::ostream& log) {
  if (!cfg.data_file) throw ConfigError("calibrate needs --data FILE (a date,symbol,rv CSV)");
  const auto file = in_stage("parse", [&] { return calib::parse_realized_vol_csv(*cfg.data_file); });
  if (file.dropped_nonpositive > 0) {
    log << "warning: dropped " << file.dropped_nonpositive << " rows with non-positive rv\n";
  }
  nn::NetworkConfig net;
  nn::ModelState state;
  if (cfg.model_file) {
    auto m = load_required_model(cfg);
    net = std::move(m.config);
    state = std::move(m.state);
  } else {
    auto train_cfg = cfg;
    train_cfg.input_length = cfg.window;
    const auto ds = make_dataset(
        dataset_spec(train_cfg, cfg.sampler, cfg.eta, "rbergomi", false, derive_seed(*cfg.seed, kData, 0)),
        derive_seed(*cfg.seed, kSplit, 0), log);
    auto run = train_and_evaluate(train_cfg, ds, derive_seed(*cfg.seed, kTrain, 0), log);
    in_stage("write", [&] {
      nn::save_model(out.add("model.bin"), run.net, run.state);
      write_loss_curve(out.add("loss_curve.csv"), run.report);
      return 0;
    });
    record_timing(timing, "train", run);
    net = std::move(run.net);
    state = std::move(run.state);
  }
  calib::CalibrationOptions options;
  options.windows = {cfg.window_total, cfg.window, cfg.window_stride};
  options.half_log = cfg.half_log;
  options.ls = ls_config(cfg);
  options.ls.dt = cfg.horizon / static_cast<double>(cfg.window);
  Stopwatch watch;
  const auto report = in_stage("calibrate", [&] { return calib::calibrate(net, state, file.series, options); });
  timing.add("calibrate", "calibrate", watch.seconds());
  in_stage("write", [&] {
    {
      std::ofstream csv(out.add("report.csv"));
      calib::write_report_csv(csv, report);
      if (!csv) throw std::runtime_error("failed writing report.csv");
    }
    {
      std::ofstream summary(out.add("summary.txt"));
      calib::write_report_summary(summary, report);
    }
    Csv csv{{"symbol", "windows", "mean_cnn_h", "mean_reference_h"}, {}};
    for (const auto& s : report.symbols) {
      csv.rows.push_back({s.symbol, std::to_string(s.windows), num(s.mean_cnn_h), num(s.mean_reference_h)});
    }
    csv.rows.push_back({"ALL", std::to_string(report.windows.size()), "rmse=" + num(report.rmse),
                        "std_difference=" + num(report.std_difference)});
    csv.write(out.add("results.csv"));
    return 0;
  });
  calib::write_report_summary(log, report);
}

bool run_gradcheck(const ExperimentConfig& cfg, Outputs& out, std::ostream& log) {
  Csv csv{{"network", "parameters", "max_relative_error"}, {}};
  double worst = 0.0;
  for (std::size_t k = 0; k < cfg.gradcheck_networks; ++k) {
    const std::uint64_t seed = derive_seed(*cfg.seed, kGradcheck, k);
    const auto net = nn::random_small_config(seed);
    const auto state = nn::initialize_model(net, derive_seed(seed, 1));
    RandomStream rng(derive_seed(seed, 2));
    std::vector<nn::Tensor> xs, ys;
    for (int b = 0; b < 3; ++b) {
      std::vector<double> x(net.input_length), y(net.output_dim());
      rng.fill_normal(x);
      rng.fill_normal(y);
      xs.push_back(nn::Tensor::vector(std::move(x)));
      ys.push_back(nn::Tensor::vector(std::move(y)));
    }
    const auto check = in_stage("gradcheck", [&] { return nn::check_gradients(net, state, xs, ys); });
    worst = std::max(worst, check.max_relative_error);
    csv.rows.push_back({std::to_string(k), std::to_string(check.parameters), num(check.max_relative_error)});
  }
  log << "max relative gradient error: " << num(worst) << " (tolerance " << num(cfg.gradcheck_tolerance) << ")\n";
  in_stage("write", [&] {
    csv.write(out.add("results.csv"));
    return 0;
  });
  return worst <= cfg.gradcheck_tolerance;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log) {
  in_stage("config", [&] {
    config.validate();
    return 0;
  });
  Outputs out = in_stage("output", [&] { return Outputs(config.out_dir); });
  Timing timing;
  RunOutcome outcome;
  try {
    switch (config.command) {
      case Command::gen_data: run_gen_data(config, out, log); break;
      case Command::train: run_train(config, out, timing, log); break;
      case Command::eval: run_eval(config, out, timing, log); break;
      case Command::robust_eta: run_robust_eta(config, out, timing, log); break;
      case Command::robust_random: run_single_random(config, out, timing, log, false); break;
      case Command::robust_fbm: run_robust_fbm(config, out, timing, log); break;
      case Command::learn_eta: run_single_random(config, out, timing, log, true); break;
      case Command::robust_ou: run_robust_ou(config, out, timing, log); break;
      case Command::calibrate: run_calibrate(config, out, timing, log); break;
      case Command::gradcheck: outcome.passed = run_gradcheck(config, out, log); break;
    }
    if (!timing.csv.rows.empty()) {
      in_stage("write", [&] {
        timing.csv.write(out.add("timing.csv"), hardware_note());
        return 0;
      });
    }
  } catch (const StageError&) {
    out.rollback();
    throw;
  } catch (const std::exception& e) {
    out.rollback();
    throw StageError("setup", e.what());
  }
  outcome.files = out.files();
  return outcome;
}

}  // namespace roughcalib::harness

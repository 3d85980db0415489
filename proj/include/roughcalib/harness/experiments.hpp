#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughcalib/harness/config.hpp"

namespace roughcalib::harness {

// Failure inside one stage of an experiment ("simulate", "train", ...).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;  // everything written, in order
  bool passed = true;                        // false when a built-in check failed (gradcheck)
};

// Runs config.command, writing results.csv, timing.csv and any loss curves,
// models or reports into config.out_dir. Progress goes to `log`. On error
// every file written by this run is removed and a StageError is thrown.
RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace roughcalib::harness

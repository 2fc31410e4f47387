#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fleetrisk/calibration.hpp"
#include "fleetrisk/strategies.hpp"
#include "fleetrisk/synthetic_fleet.hpp"

namespace fleetrisk {

struct PhaseConfig {
  double dev_fraction = 0.2;
  int dev_daily_quota = 5;
  int final_quota = 3;
};

struct RunConfig {
  GeneratorConfig generator;
  StrategyKind strategy = StrategyKind::TwoStep;
  StrategySettings settings;
  // Per-split quantile shift of the train table and both test generations.
  bool normalize = true;
  bool calibrate = true;
  CalibrationOptions calibration;
  PhaseConfig phases;
  std::filesystem::path output_dir = "run";
};

// The reference desk-scale setup: 200 trucks, 20 features, 30% failures,
// seed 42.
RunConfig reference_run_config();

// INI-style key/value file. Sections: generator, features, learner,
// strategy, twostep, jump, pseudolabel, calibration, phases, run. Keys not
// present keep the defaults of reference_run_config(); unknown sections or
// keys raise ErrorKind::Config.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

// Writes every setting in the format parse_run_config reads. The [run]
// section is optional so configs stored inside an output tree do not depend
// on where that tree lives.
void write_run_config(const RunConfig& config, std::ostream& out, bool include_run_section = true);
void save_run_config(const RunConfig& config, const std::filesystem::path& path,
                     bool include_run_section = true);

void validate(const RunConfig& config);

}  // namespace fleetrisk

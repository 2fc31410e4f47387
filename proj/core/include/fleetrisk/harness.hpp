#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fleetrisk/run_config.hpp"
#include "fleetrisk/scoring.hpp"

namespace fleetrisk {

enum class Phase { Development, Final };

std::string_view to_string(Phase phase);
// Accepts "dev" / "final". Throws ErrorKind::Config.
Phase parse_phase(std::string_view text);

struct Submission {
  Phase phase = Phase::Development;
  // Calendar day of a development submission; ignored in the final phase.
  int day = 0;
  std::vector<RiskLabel> labels;
};

struct ExperimentEntry {
  Phase phase = Phase::Development;
  std::size_t index = 0;  // submission index within its phase
  int day = 0;
  ScoreReport report;
  double best_so_far = 0.0;
};

struct ExperimentRecord {
  std::vector<ExperimentEntry> entries;

  std::optional<double> best(Phase phase) const;
  std::string to_text() const;
};

// Scores development submissions on a fixed dev_fraction subsample of the
// truth and final submissions on all of it. Throws ErrorKind::Quota when a
// day receives more than dev_daily_quota submissions or the final phase more
// than final_quota, and ErrorKind::Alignment for a misaligned submission.
ExperimentRecord simulate_phases(std::span<const RiskLabel> truth,
                                 std::span<const Generation> gens,
                                 const std::vector<Submission>& submissions,
                                 const PhaseConfig& phases, std::uint64_t seed);

// Receives one line per finished stage.
using StageLogger = std::function<void(std::string_view)>;

struct PreparedTables {
  FleetTable train;
  FleetTable test;
};

// Applies per-split quantile normalization (train, test gen1, test gen2)
// when `normalize` is set; the tree baseline always sees raw features.
PreparedTables prepare_tables(const FleetTable& train, const FleetTable& test,
                              StrategyKind strategy, const FeatureOptions& features,
                              bool normalize);

struct StrategyRun {
  std::vector<RiskLabel> labels;
  StrategySettings settings;  // after calibration
  std::optional<double> validation_score;
};

// Optional calibration on a held-out part of `train`, then prediction on
// `test`. Tables are expected to be prepared already.
StrategyRun run_strategy(StrategyKind kind, const FleetTable& train, const FleetTable& test,
                         const StrategySettings& settings, bool calibrate,
                         const CalibrationOptions& calibration,
                         const FailureMap* failures = nullptr);

// generate -> split -> normalize -> calibrate -> predict -> validate the
// prediction file -> score -> phase record. Every artifact is written under
// config.output_dir; the same config always yields byte-identical files.
ExperimentRecord run_all(const RunConfig& config, const StageLogger& log = {});

// File names used inside a run directory.
namespace run_files {
inline constexpr const char* kTrain = "train_gen1.csv";
inline constexpr const char* kTest = "public_X_test.csv";
inline constexpr const char* kVariants = "variants.csv";
inline constexpr const char* kTruth = "truth.csv";
inline constexpr const char* kFailures = "failures.csv";
inline constexpr const char* kConfig = "fitted_config.ini";
inline constexpr const char* kPrediction = "prediction.csv";
inline constexpr const char* kReport = "score_report.txt";
inline constexpr const char* kRecord = "experiment_record.txt";
}  // namespace run_files

}  // namespace fleetrisk

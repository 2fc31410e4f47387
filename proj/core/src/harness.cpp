#include "fleetrisk/harness.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fleetrisk/error.hpp"
#include "fleetrisk/features.hpp"
#include "fleetrisk/schema_io.hpp"
#include "fleetrisk/synthetic_fleet.hpp"

namespace fleetrisk {
namespace {

constexpr std::uint64_t kDevStream = 0xde7;

std::string fixed(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", v);
  return buffer;
}

class StageTimer {
 public:
  StageTimer(const StageLogger& log, std::string name)
      : log_(log), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

  void done(const std::string& detail = {}) {
    if (!log_) return;
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    std::string line = "[" + name_ + "] " + fixed(elapsed.count()) + " s";
    if (!detail.empty()) line += " " + detail;
    log_(line);
  }

 private:
  const StageLogger& log_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

// Runs `body` and prefixes any library error with the stage name.
template <typename F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage '") + stage + "': " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

}  // namespace

std::string_view to_string(Phase phase) {
  return phase == Phase::Development ? "dev" : "final";
}

Phase parse_phase(std::string_view text) {
  if (text == "dev") return Phase::Development;
  if (text == "final") return Phase::Final;
  throw Error(ErrorKind::Config, "unknown phase '" + std::string(text) + "'");
}

std::optional<double> ExperimentRecord::best(Phase phase) const {
  std::optional<double> best;
  for (const auto& entry : entries) {
    if (entry.phase == phase) best = entry.best_so_far;
  }
  return best;
}

std::string ExperimentRecord::to_text() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << to_string(e.phase) << " #" << e.index;
    if (e.phase == Phase::Development) out << " day=" << e.day;
    out << ' ' << e.report.to_record() << " best_so_far=" << fixed(e.best_so_far) << '\n';
  }
  for (auto phase : {Phase::Development, Phase::Final}) {
    if (const auto b = best(phase)) out << "best " << to_string(phase) << '=' << fixed(*b) << '\n';
  }
  return out.str();
}

ExperimentRecord simulate_phases(std::span<const RiskLabel> truth,
                                 std::span<const Generation> gens,
                                 const std::vector<Submission>& submissions,
                                 const PhaseConfig& phases, std::uint64_t seed) {
  ExperimentRecord record;
  std::map<int, int> per_day;
  std::size_t dev_index = 0;
  std::size_t final_index = 0;
  std::optional<double> best[2];
  for (const auto& submission : submissions) {
    const bool dev = submission.phase == Phase::Development;
    const std::size_t index = dev ? dev_index++ : final_index++;
    const std::string tag = std::string(to_string(submission.phase)) + " submission #" +
                            std::to_string(index);
    if (dev && ++per_day[submission.day] > phases.dev_daily_quota) {
      throw Error(ErrorKind::Quota, tag + " exceeds the daily quota of " +
                                        std::to_string(phases.dev_daily_quota) + " on day " +
                                        std::to_string(submission.day));
    }
    if (!dev && static_cast<int>(index) >= phases.final_quota) {
      throw Error(ErrorKind::Quota, tag + " exceeds the final-phase quota of " +
                                        std::to_string(phases.final_quota));
    }
    if (submission.labels.size() != truth.size()) {
      throw Error(ErrorKind::Alignment, tag + " has " + std::to_string(submission.labels.size()) +
                                            " rows, truth has " + std::to_string(truth.size()));
    }
    ExperimentEntry entry;
    entry.phase = submission.phase;
    entry.index = index;
    entry.day = submission.day;
    entry.report = dev ? dev_phase_score(truth, submission.labels, gens, phases.dev_fraction,
                                         derive_seed(seed, kDevStream))
                       : challenge_score(truth, submission.labels, gens);
    auto& b = best[dev ? 0 : 1];
    if (!b || entry.report.final_score > *b) b = entry.report.final_score;
    entry.best_so_far = *b;
    record.entries.push_back(std::move(entry));
  }
  return record;
}

PreparedTables prepare_tables(const FleetTable& train, const FleetTable& test,
                              StrategyKind strategy, const FeatureOptions& features,
                              bool normalize) {
  if (!normalize || strategy == StrategyKind::TreeBaseline || strategy == StrategyKind::Oracle) {
    return {train, test};
  }
  return {quantile_shift_normalize(train, features.quantile_q, SplitKey::Train),
          normalize_test_table(test, features.quantile_q)};
}

StrategyRun run_strategy(StrategyKind kind, const FleetTable& train, const FleetTable& test,
                         const StrategySettings& settings, bool calibrate,
                         const CalibrationOptions& calibration, const FailureMap* failures) {
  StrategyRun run;
  run.settings = settings;
  const bool tunable = kind == StrategyKind::TwoStep || kind == StrategyKind::Jump ||
                       kind == StrategyKind::PseudoLabel;
  if (calibrate && tunable) {
    const auto result = calibrate_thresholds(kind, train, settings, calibration);
    run.settings = result.settings;
    run.validation_score = result.validation_score;
  }
  run.labels = predict(kind, train, test, run.settings, failures);
  return run;
}

ExperimentRecord run_all(const RunConfig& config, const StageLogger& log) {
  validate(config);
  const auto& dir = config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());

  StageTimer generate_timer(log, "generate");
  const auto generated = in_stage("generate", [&] { return generate_fleet(config.generator); });
  generate_timer.done(std::to_string(generated.fleet.rows.size()) + " readouts");

  StageTimer split_timer(log, "split");
  const auto split = in_stage("split", [&] { return split_train_test(generated, config.generator); });
  in_stage("split", [&] {
    write_fleet_table(split.train, dir / run_files::kTrain);
    write_fleet_table(split.test, dir / run_files::kTest);
    write_fleet_table(split.truth, dir / run_files::kTruth);
    write_variants(generated.variants, dir / run_files::kVariants);
    write_failures(generated.failures, dir / run_files::kFailures);
    return 0;
  });
  split_timer.done(std::to_string(split.train.rows.size()) + " train rows, " +
                   std::to_string(split.test.rows.size()) + " test rows, " +
                   std::to_string(split.skipped_trucks) + " trucks skipped");

  StageTimer normalize_timer(log, "normalize");
  const auto tables = in_stage("normalize", [&] {
    return prepare_tables(split.train, split.test, config.strategy, config.settings.features,
                          config.normalize);
  });
  normalize_timer.done();

  StageTimer predict_timer(log, "calibrate+predict");
  const auto run = in_stage("predict", [&] {
    return run_strategy(config.strategy, tables.train, tables.test, config.settings,
                        config.calibrate, config.calibration, &split.test_failures);
  });
  RunConfig fitted = config;
  fitted.settings = run.settings;
  in_stage("predict", [&] {
    save_run_config(fitted, dir / run_files::kConfig, false);
    write_prediction_file(run.labels, dir / run_files::kPrediction);
    return 0;
  });
  predict_timer.done(std::string(to_string(config.strategy)) +
                     (run.validation_score ? " validation=" + fixed(*run.validation_score) : ""));

  StageTimer score_timer(log, "score");
  const auto record = in_stage("score", [&] {
    const auto labels = read_prediction_file(dir / run_files::kPrediction, split.test.rows.size());
    std::vector<RiskLabel> truth;
    std::vector<Generation> gens;
    for (const auto& row : split.truth.rows) {
      truth.push_back(*row.risk_level);
      gens.push_back(row.gen);
    }
    const std::vector<Submission> submissions = {{Phase::Development, 0, labels},
                                                 {Phase::Final, 0, labels}};
    const auto rec =
        simulate_phases(truth, gens, submissions, config.phases, config.generator.seed);
    write_text(dir / run_files::kReport, rec.entries.back().report.to_text() +
                                             rec.entries.back().report.to_record() + "\n");
    write_text(dir / run_files::kRecord, rec.to_text());
    return rec;
  });
  score_timer.done(record.entries.back().report.to_record());
  return record;
}

}  // namespace fleetrisk

// Command-line front end for the fleetrisk pipeline. Every subcommand reads
// and writes plain files so stages can be re-run independently.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fleetrisk/error.hpp"
#include "fleetrisk/features.hpp"
#include "fleetrisk/harness.hpp"
#include "fleetrisk/labeling.hpp"
#include "fleetrisk/run_config.hpp"
#include "fleetrisk/schema_io.hpp"
#include "fleetrisk/synthetic_fleet.hpp"

namespace fs = std::filesystem;
using namespace fleetrisk;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig config = g.config_path.empty() ? reference_run_config() : load_run_config(g.config_path);
  if (g.seed) {
    config.generator.seed = *g.seed;
    config.settings.seed = *g.seed;
  }
  if (!g.out_dir.empty()) config.output_dir = g.out_dir;
  return config;
}

fs::path ensure_out(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    throw Error(ErrorKind::Io,
                "cannot create '" + config.output_dir.string() + "': " + ec.message());
  }
  return config.output_dir;
}

std::pair<std::vector<RiskLabel>, std::vector<Generation>> truth_columns(const FleetTable& truth) {
  std::vector<RiskLabel> labels;
  std::vector<Generation> gens;
  for (const auto& row : truth.rows) {
    labels.push_back(*row.risk_level);
    gens.push_back(row.gen);
  }
  return {labels, gens};
}

void log_line(std::string_view line) { std::cerr << line << '\n'; }

int cmd_generate(const GlobalOptions& g) {
  const auto config = resolve_config(g);
  const auto dir = ensure_out(config);
  const auto generated = generate_fleet(config.generator);
  const auto split = split_train_test(generated, config.generator);
  write_fleet_table(split.train, dir / run_files::kTrain);
  write_fleet_table(split.test, dir / run_files::kTest);
  write_fleet_table(split.truth, dir / run_files::kTruth);
  write_variants(generated.variants, dir / run_files::kVariants);
  write_failures(generated.failures, dir / run_files::kFailures);
  std::cout << "wrote " << split.train.rows.size() << " train rows and " << split.test.rows.size()
            << " test rows to " << dir.string() << '\n';
  return 0;
}

int cmd_label(const GlobalOptions& g, const std::string& fleet_path,
              const std::string& failures_path, const std::string& output) {
  const auto config = resolve_config(g);
  const auto fleet = read_fleet_table(fleet_path, false);
  const auto failures = read_failures(failures_path);
  const auto labeled = label_fleet(fleet, failures);
  const fs::path path = output.empty() ? ensure_out(config) / "labeled.csv" : fs::path(output);
  write_fleet_table(labeled, path);
  std::cout << "wrote " << labeled.rows.size() << " labeled rows to " << path.string() << '\n';
  return 0;
}

// One CSV row per truck: the flat feature vector of its last ten readouts.
int cmd_featurize(const GlobalOptions& g, const std::string& table_path, bool labeled,
                  const std::string& variants_path, const std::string& output) {
  const auto config = resolve_config(g);
  const auto& options = config.settings.features;
  validate(options);
  const auto table = read_fleet_table(table_path, labeled);
  std::map<std::string, std::vector<int>> specs;
  if (!variants_path.empty()) {
    for (auto& row : read_variants(variants_path).rows) specs[row.chassis_id] = row.specs;
  }
  const std::size_t n_specs = options.include_variants ? kNumVariantSpecs : 0;
  const std::size_t width = flat_feature_length(kWindowLength, table.n_features, options, n_specs);

  const fs::path path = output.empty() ? ensure_out(config) / "features.csv" : fs::path(output);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << "chassis_id,gen,end_timestep";
  for (std::size_t k = 0; k < width; ++k) out << ",x" << k;
  out << '\n';
  std::size_t written = 0;
  for (const auto& span : truck_spans(table)) {
    if (span.size() < kWindowLength) continue;
    const auto window = window_ending_at(table, span, table.rows[span.end - 1].timestep);
    std::span<const int> truck_specs;
    if (options.include_variants) {
      const auto it = specs.find(window.chassis_id);
      if (it == specs.end()) {
        throw Error(ErrorKind::Mapping, "no variant specs for chassis '" + window.chassis_id + "'");
      }
      truck_specs = it->second;
    }
    const auto features = build_feature_matrix(window, options, truck_specs);
    out << window.chassis_id << ',' << to_string(window.gen) << ',' << window.end_timestep();
    for (double v : features.flat) out << ',' << format_double(v);
    out << '\n';
    ++written;
  }
  std::cout << "wrote " << written << " feature vectors of width " << width << " to "
            << path.string() << '\n';
  return 0;
}

PreparedTables load_prepared(const RunConfig& config, StrategyKind kind,
                             const std::string& train_path, const std::string& test_path) {
  const auto train = read_fleet_table(train_path, true);
  const auto test = test_path.empty() ? FleetTable{} : read_fleet_table(test_path, false);
  return prepare_tables(train, test, kind, config.settings.features, config.normalize);
}

int cmd_calibrate(const GlobalOptions& g, const std::string& strategy,
                  const std::string& train_path, const std::string& output) {
  auto config = resolve_config(g);
  if (!strategy.empty()) config.strategy = parse_strategy(strategy);
  const auto tables = load_prepared(config, config.strategy, train_path, {});
  const auto result =
      calibrate_thresholds(config.strategy, tables.train, config.settings, config.calibration);
  config.settings = result.settings;
  const fs::path path = output.empty() ? ensure_out(config) / run_files::kConfig : fs::path(output);
  save_run_config(config, path, false);
  std::cout << "validation score " << result.validation_score << ", fitted config written to "
            << path.string() << '\n';
  return 0;
}

int cmd_predict(const GlobalOptions& g, const std::string& strategy,
                const std::string& train_path, const std::string& test_path,
                const std::string& failures_path, bool calibrate, const std::string& output) {
  auto config = resolve_config(g);
  if (!strategy.empty()) config.strategy = parse_strategy(strategy);
  const auto tables = load_prepared(config, config.strategy, train_path, test_path);
  FailureMap failures;
  if (!failures_path.empty()) failures = read_failures(failures_path);
  const auto run = run_strategy(config.strategy, tables.train, tables.test, config.settings,
                                calibrate, config.calibration,
                                failures_path.empty() ? nullptr : &failures);
  const fs::path path =
      output.empty() ? ensure_out(config) / run_files::kPrediction : fs::path(output);
  write_prediction_file(run.labels, path);
  std::cout << "wrote " << run.labels.size() << " predictions to " << path.string() << '\n';
  return 0;
}

int cmd_score(const GlobalOptions& g, const std::string& truth_path, const std::string& pred_path,
              const std::string& phase_text) {
  const auto config = resolve_config(g);
  const auto truth = read_fleet_table(truth_path, true);
  const auto pred = read_prediction_file(pred_path, truth.rows.size());
  const auto [labels, gens] = truth_columns(truth);
  // Same subsample as simulate-phases for a given seed.
  const std::vector<Submission> one = {{parse_phase(phase_text), 0, pred}};
  const auto report =
      simulate_phases(labels, gens, one, config.phases, config.generator.seed).entries[0].report;
  std::cout << report.to_text() << report.to_record() << '\n';
  return 0;
}

// Manifest lines: "<dev|final> <day> <prediction path>"; '#' starts a comment.
int cmd_simulate(const GlobalOptions& g, const std::string& truth_path,
                 const std::string& manifest_path) {
  const auto config = resolve_config(g);
  const auto truth = read_fleet_table(truth_path, true);
  const auto [labels, gens] = truth_columns(truth);
  std::ifstream manifest(manifest_path);
  if (!manifest) throw Error(ErrorKind::Io, "cannot open '" + manifest_path + "'");
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<Submission> submissions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string phase, path;
    int day = 0;
    if (!(fields >> phase)) continue;
    if (!(fields >> day >> path)) {
      throw Error(ErrorKind::Parse, "manifest line " + std::to_string(line_no) +
                                        ": expected '<phase> <day> <path>'");
    }
    fs::path file(path);
    if (file.is_relative()) file = base / file;
    submissions.push_back({parse_phase(phase), day, read_prediction_file(file, labels.size())});
  }
  const auto record =
      simulate_phases(labels, gens, submissions, config.phases, config.generator.seed);
  std::cout << record.to_text();
  return 0;
}

int cmd_run_all(const GlobalOptions& g, const std::string& strategy) {
  auto config = resolve_config(g);
  if (!strategy.empty()) config.strategy = parse_strategy(strategy);
  const auto record = run_all(config, log_line);
  std::cout << record.entries.back().report.to_text() << record.entries.back().report.to_record()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fleetrisk: truck failure-risk prediction pipeline on synthetic fleet data"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "Run config file (INI)")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Override generator and strategy seed");
  app.add_option("--out", g.out_dir, "Output directory");

  std::string strategy, train, test, truth, pred, failures, fleet, table, variants, output,
      manifest, phase = "final";
  bool labeled = false;
  bool calibrate = false;

  auto* generate = app.add_subcommand("generate", "Generate a synthetic fleet and split it");

  auto* label = app.add_subcommand("label", "Attach risk labels to a fleet CSV");
  label->add_option("--fleet", fleet, "Unlabeled fleet CSV")->required();
  label->add_option("--failures", failures, "Failures CSV")->required();
  label->add_option("-o,--output", output, "Labeled CSV path");

  auto* featurize = app.add_subcommand("featurize", "Dump per-truck feature vectors as CSV");
  featurize->add_option("--table", table, "Fleet CSV")->required();
  featurize->add_flag("--labeled", labeled, "Input carries a risk_level column");
  featurize->add_option("--variants", variants, "Variants CSV");
  featurize->add_option("-o,--output", output, "Feature CSV path");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit strategy thresholds on a hold-out");
  calibrate_cmd->add_option("--strategy", strategy, "twostep|jump|pseudolabel");
  calibrate_cmd->add_option("--train", train, "Labeled train CSV")->required();
  calibrate_cmd->add_option("-o,--output", output, "Fitted config path");

  auto* predict_cmd = app.add_subcommand("predict", "Predict risk labels for a test CSV");
  predict_cmd->add_option("--strategy", strategy, "twostep|jump|pseudolabel|tree-baseline|oracle");
  predict_cmd->add_option("--train", train, "Labeled train CSV")->required();
  predict_cmd->add_option("--test", test, "Test CSV")->required();
  predict_cmd->add_option("--failures", failures, "Failures CSV (oracle only)");
  predict_cmd->add_flag("--calibrate", calibrate, "Calibrate thresholds before predicting");
  predict_cmd->add_option("-o,--output", output, "Prediction CSV path");

  auto* score = app.add_subcommand("score", "Score a prediction file");
  score->add_option("--truth", truth, "Truth CSV")->required();
  score->add_option("--pred", pred, "Prediction CSV")->required();
  score->add_option("--phase", phase, "dev|final")->check(CLI::IsMember({"dev", "final"}));

  auto* simulate = app.add_subcommand("simulate-phases", "Replay a submission manifest");
  simulate->add_option("--truth", truth, "Truth CSV")->required();
  simulate->add_option("--manifest", manifest, "Lines of '<dev|final> <day> <path>'")->required();

  auto* run_all_cmd = app.add_subcommand("run-all", "Run the whole pipeline");
  run_all_cmd->add_option("--strategy", strategy, "Override the configured strategy");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;

  const auto* chosen = app.get_subcommands().front();
  try {
    if (chosen == generate) return cmd_generate(g);
    if (chosen == label) return cmd_label(g, fleet, failures, output);
    if (chosen == featurize) return cmd_featurize(g, table, labeled, variants, output);
    if (chosen == calibrate_cmd) return cmd_calibrate(g, strategy, train, output);
    if (chosen == predict_cmd) {
      return cmd_predict(g, strategy, train, test, failures, calibrate, output);
    }
    if (chosen == score) return cmd_score(g, truth, pred, phase);
    if (chosen == simulate) return cmd_simulate(g, truth, manifest);
    if (chosen == run_all_cmd) return cmd_run_all(g, strategy);
  } catch (const Error& e) {
    std::cerr << "fleetrisk " << chosen->get_name() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fleetrisk " << chosen->get_name() << ": " << e.what() << '\n';
    return 3;
  }
  return 1;
}

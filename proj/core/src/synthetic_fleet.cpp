#include "fleetrisk/synthetic_fleet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "fleetrisk/error.hpp"
#include "fleetrisk/labeling.hpp"
#include "fleetrisk/rng.hpp"

namespace fleetrisk {
namespace {

constexpr std::uint64_t kBaselineStream = 0xba5e;
constexpr std::uint64_t kFailureStream = 0xfa11;
constexpr std::uint64_t kSplitStream = 0x5b17;
constexpr std::uint64_t kWindowStream = 0x3d0;
constexpr std::uint64_t kTruckStream = 0x7c0c;
constexpr int kSpecVocabulary[kNumVariantSpecs] = {4, 3, 6, 2, 5, 3, 8, 2, 4, 3, 5, 7};

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorKind::Config, message);
}

std::string chassis_name(std::size_t index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "C%06zu", index);
  return buffer;
}

}  // namespace

void validate(const GeneratorConfig& c) {
  require(c.n_trucks > 0, "n_trucks must be positive");
  require(c.n_features > 0, "n_features must be positive");
  require(c.failure_fraction >= 0.0 && c.failure_fraction <= 1.0,
          "failure_fraction must lie in [0, 1]");
  require(c.min_length >= 1 && c.max_length >= c.min_length,
          "length range must satisfy 1 <= min_length <= max_length");
  require(c.failure_fraction == 0.0 || c.min_length >= 19,
          "min_length must be >= 19 when trucks can fail");
  require(c.n_signal_features <= c.n_features, "n_signal_features must not exceed n_features");
  require(c.drift_strength >= 0.0, "drift_strength must be >= 0");
  require(c.drift_strength == 0.0 || c.n_signal_features >= 1,
          "drift_strength > 0 needs at least one signal feature");
  require(c.noise_sigma > 0.0, "noise_sigma must be positive");
  require(c.gen2_fraction >= 0.0 && c.gen2_fraction <= 1.0, "gen2_fraction must lie in [0, 1]");
  require(c.gen2_scale > 0.0, "gen2_scale must be positive");
  require(c.outlier_rate >= 0.0 && c.outlier_rate < 1.0, "outlier_rate must lie in [0, 1)");
  require(c.outlier_magnitude > 0.0, "outlier_magnitude must be positive");
  require(c.test_fraction >= 0.0 && c.test_fraction < 1.0, "test_fraction must lie in [0, 1)");
}

GeneratorConfig full_scale_config() {
  GeneratorConfig config;
  config.n_trucks = 7280;
  config.n_features = 304;
  config.n_signal_features = 40;
  config.min_length = 19;
  config.max_length = 40;
  return config;
}

GeneratedFleet generate_fleet(const GeneratorConfig& config) {
  validate(config);
  GeneratedFleet out;
  out.fleet.n_features = config.n_features;

  auto baseline_rng = make_rng(config.seed, kBaselineStream);
  std::uniform_real_distribution<double> baseline_dist(0.0, 10.0);
  out.baselines.resize(config.n_features);
  for (auto& b : out.baselines) b = baseline_dist(baseline_rng);

  const auto n_failed =
      static_cast<std::size_t>(std::llround(config.failure_fraction * double(config.n_trucks)));
  std::vector<std::size_t> order(config.n_trucks);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto failure_rng = make_rng(config.seed, kFailureStream);
  std::shuffle(order.begin(), order.end(), failure_rng);
  std::vector<bool> failed(config.n_trucks, false);
  for (std::size_t i = 0; i < n_failed; ++i) failed[order[i]] = true;

  for (std::size_t truck = 0; truck < config.n_trucks; ++truck) {
    auto rng = make_rng(derive_seed(config.seed, kTruckStream), truck);
    std::uniform_int_distribution<int> length_dist(config.min_length, config.max_length);
    std::bernoulli_distribution gen2_dist(config.gen2_fraction);
    std::normal_distribution<double> noise(0.0, config.noise_sigma);
    std::bernoulli_distribution outlier_dist(config.outlier_rate);
    std::uniform_int_distribution<std::size_t> feature_pick(0, config.n_features - 1);

    const std::string id = chassis_name(truck);
    const int length = length_dist(rng);
    const Generation gen = gen2_dist(rng) ? Generation::Gen2 : Generation::Gen1;
    std::optional<int> failure;
    if (failed[truck]) failure = length;
    out.failures.emplace(id, failure);

    for (int t = 1; t <= length; ++t) {
      Readout row;
      row.timestep = t;
      row.chassis_id = id;
      row.gen = gen;
      row.features.resize(config.n_features);
      double drift = 0.0;
      if (failure) {
        const double ttf = double(*failure - t);
        drift = config.drift_strength * std::max(0.0, 1.0 - ttf / double(kMediumHorizon));
      }
      for (std::size_t k = 0; k < config.n_features; ++k) {
        double value = out.baselines[k] + noise(rng);
        if (k < config.n_signal_features) value += drift;
        row.features[k] = value;
      }
      // Outliers are placed before the generation transform so they sit
      // below the main distribution of either generation.
      if (outlier_dist(rng)) {
        const auto k = feature_pick(rng);
        row.features[k] = out.baselines[k] - config.outlier_magnitude;
      }
      if (gen == Generation::Gen2) {
        for (auto& v : row.features) v = config.gen2_scale * v + config.gen2_shift;
      }
      out.fleet.rows.push_back(std::move(row));
    }

    VariantRecord record;
    record.chassis_id = id;
    for (std::size_t s = 0; s < kNumVariantSpecs; ++s) {
      std::uniform_int_distribution<int> spec_dist(0, kSpecVocabulary[s] - 1);
      record.specs.push_back(spec_dist(rng));
    }
    out.variants.rows.push_back(std::move(record));
  }
  return out;
}

TrainTestSplit split_train_test(const GeneratedFleet& generated, const GeneratorConfig& config) {
  const auto& fleet = generated.fleet;
  const auto spans = truck_spans(fleet);

  std::vector<std::size_t> gen1;
  std::vector<std::size_t> test_trucks;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (fleet.rows[spans[i].begin].gen == Generation::Gen1) {
      gen1.push_back(i);
    } else {
      test_trucks.push_back(i);
    }
  }
  auto split_rng = make_rng(config.seed, kSplitStream);
  std::shuffle(gen1.begin(), gen1.end(), split_rng);
  const auto n_gen1_test =
      static_cast<std::size_t>(std::llround(config.test_fraction * double(gen1.size())));
  if (gen1.size() <= n_gen1_test) {
    throw Error(ErrorKind::Split, "no gen1 trucks left for the training table");
  }
  std::vector<bool> is_test(spans.size(), false);
  for (std::size_t i = 0; i < n_gen1_test; ++i) test_trucks.push_back(gen1[i]);
  for (auto i : test_trucks) is_test[i] = true;

  const auto failure_of = [&](std::size_t truck) {
    return generated.failures.at(fleet.rows[spans[truck].begin].chassis_id);
  };

  TrainTestSplit split;
  split.train.n_features = fleet.n_features;
  split.train.has_labels = true;
  split.test.n_features = fleet.n_features;
  split.truth.has_labels = true;

  FleetTable labeled = label_fleet(fleet, generated.failures);
  for (std::size_t truck = 0; truck < spans.size(); ++truck) {
    const auto& span = spans[truck];
    if (!is_test[truck]) {
      for (std::size_t r = span.begin; r < span.end; ++r) {
        split.train.rows.push_back(labeled.rows[r]);
      }
      continue;
    }
    const auto failure = failure_of(truck);
    if (eligible_window_ends(labeled, span, failure).empty()) {
      ++split.skipped_trucks;
      continue;
    }
    auto rng = make_rng(derive_seed(config.seed, kWindowStream), truck);
    const auto window = extract_test_window(labeled, span, failure, rng);
    split.test_failures.emplace(window.chassis_id, failure);
    for (std::size_t i = 0; i < window.length(); ++i) {
      Readout row;
      row.timestep = window.start_timestep + static_cast<int>(i);
      row.chassis_id = window.chassis_id;
      row.gen = window.gen;
      row.features = window.rows[i];
      Readout truth_row = row;
      truth_row.features.clear();
      truth_row.risk_level = window.labels[i];
      split.test.rows.push_back(std::move(row));
      split.truth.rows.push_back(std::move(truth_row));
    }
  }
  return split;
}

}  // namespace fleetrisk

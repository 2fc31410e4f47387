#pragma once

#include <cstdint>
#include <vector>

#include "fleetrisk/types.hpp"

namespace fleetrisk {

struct GeneratorConfig {
  std::size_t n_trucks = 200;
  std::size_t n_features = 20;
  double failure_fraction = 0.3;
  int min_length = 30;
  int max_length = 60;
  std::size_t n_signal_features = 5;
  double drift_strength = 2.0;
  double noise_sigma = 1.0;
  double gen2_fraction = 0.5;
  double gen2_shift = 3.0;
  double gen2_scale = 1.0;
  double outlier_rate = 0.002;
  double outlier_magnitude = 25.0;
  // Share of gen1 trucks routed to the test table by split_train_test.
  double test_fraction = 0.3;
  std::uint64_t seed = 42;
};

// Throws ErrorKind::Config naming the first violated constraint.
void validate(const GeneratorConfig& config);

// Schema parity with the original challenge files (7,280 train trucks, 304
// features). Not meant to be run in tests.
GeneratorConfig full_scale_config();

struct GeneratedFleet {
  FleetTable fleet;  // unlabeled, full series
  VariantsTable variants;
  FailureMap failures;
  // Per-feature healthy mean, before the gen2 transform.
  std::vector<double> baselines;
};

// Degradation model: each signal feature of a failed truck drifts by
// drift_strength * max(0, 1 - ttf / 18). Trucks get independent substreams
// derived from (seed, truck index), so the output depends on the config only.
GeneratedFleet generate_fleet(const GeneratorConfig& config);

struct TrainTestSplit {
  FleetTable train;  // gen1 trucks only, full series, labeled
  FleetTable test;   // one length-10 window per truck, unlabeled
  FleetTable truth;  // labels aligned row-for-row with `test`, no features
  FailureMap test_failures;
  std::size_t skipped_trucks = 0;
};

// Partitions trucks disjointly: a `test_fraction` share of gen1 trucks plus
// every gen2 truck go to the test table. Throws ErrorKind::Split when there
// is no gen1 truck for training.
TrainTestSplit split_train_test(const GeneratedFleet& generated, const GeneratorConfig& config);

}  // namespace fleetrisk

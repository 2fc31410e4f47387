#pragma once

// Small generated fleets shared by the strategy, calibration and harness tests.

#include "fleetrisk/harness.hpp"
#include "fleetrisk/synthetic_fleet.hpp"

namespace fixture {

inline fleetrisk::GeneratorConfig small_generator(std::uint64_t seed = 42) {
  fleetrisk::GeneratorConfig c;
  c.n_trucks = 60;
  c.n_features = 6;
  c.n_signal_features = 3;
  c.seed = seed;
  return c;
}

inline fleetrisk::StrategySettings fast_settings() {
  fleetrisk::StrategySettings s;
  s.learners.hyper.epochs = 60;
  s.learners.n_models = 2;
  s.learners.n_draws = 3;
  s.pseudolabel.mirror_passes = 2;
  return s;
}

struct SmallSplit {
  fleetrisk::GeneratedFleet generated;
  fleetrisk::TrainTestSplit split;
};

inline SmallSplit small_split(std::uint64_t seed = 42) {
  const auto config = small_generator(seed);
  SmallSplit out{fleetrisk::generate_fleet(config), {}};
  out.split = fleetrisk::split_train_test(out.generated, config);
  return out;
}

}  // namespace fixture

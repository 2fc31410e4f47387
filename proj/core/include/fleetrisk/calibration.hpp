#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fleetrisk/strategies.hpp"

namespace fleetrisk {

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

// Cartesian product of the axes, in axis order.
using ParameterGrid = std::vector<GridAxis>;

struct GridSearchResult {
  std::vector<double> point;
  double score = 0.0;
};

// Maximizes `evaluate` over the grid. Points for which it returns nullopt are
// infeasible and skipped. Equal scores resolve to the lexicographically
// smallest point. Throws ErrorKind::Config for an empty grid (or one without a
// feasible point).
GridSearchResult grid_search(
    const ParameterGrid& grid,
    const std::function<std::optional<double>(std::span<const double>)>& evaluate);

// Axes: t_min, t_mean, t_max, aux_lo, aux_hi, boundary_shift_limit.
ParameterGrid default_twostep_grid();
// Axis: healthy_threshold.
ParameterGrid default_jump_grid();
// Axis: confidence_fraction.
ParameterGrid default_pseudolabel_grid();

struct CalibrationOptions {
  double validation_fraction = 0.25;
  ParameterGrid twostep_grid = default_twostep_grid();
  ParameterGrid jump_grid = default_jump_grid();
  ParameterGrid pseudolabel_grid = default_pseudolabel_grid();
};

struct ValidationSplit {
  FleetTable fit;         // labeled, full series
  FleetTable validation;  // one test-style window per truck, unlabeled
  FleetTable truth;       // labels aligned with `validation`
};

// Holds out a seeded, failure-stratified share of the training trucks and
// cuts one test-style window from each. Throws ErrorKind::Split when either
// side would lose all failed or all healthy trucks.
ValidationSplit make_validation_split(const FleetTable& train, double fraction,
                                      std::uint64_t seed);

struct CalibrationResult {
  StrategySettings settings;
  std::vector<double> point;
  double validation_score = 0.0;
};

// Fits the strategy's models once on the fit part and searches its grid for
// the best final score on the validation windows. Throws ErrorKind::Config
// for strategies without tunable thresholds.
CalibrationResult calibrate_thresholds(StrategyKind kind, const FleetTable& train,
                                       const StrategySettings& base,
                                       const CalibrationOptions& options = {});

}  // namespace fleetrisk

#include "fleetrisk/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "fleetrisk/error.hpp"
#include "fleetrisk/labeling.hpp"
#include "fleetrisk/scoring.hpp"

namespace fleetrisk {
namespace {

constexpr std::uint64_t kValidationStream = 0xca11;

std::size_t axis_index(const ParameterGrid& grid, std::string_view name) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].name == name) return i;
  }
  throw Error(ErrorKind::Config, "grid lacks axis '" + std::string(name) + "'");
}

void check_axes(const ParameterGrid& grid, std::initializer_list<std::string_view> allowed) {
  for (const auto& axis : grid) {
    if (std::find(allowed.begin(), allowed.end(), axis.name) == allowed.end()) {
      throw Error(ErrorKind::Config, "unknown grid axis '" + axis.name + "'");
    }
  }
}

double validation_score(const ValidationSplit& split, const std::vector<RiskLabel>& predicted) {
  std::vector<RiskLabel> truth;
  std::vector<Generation> gens;
  for (const auto& row : split.truth.rows) {
    truth.push_back(*row.risk_level);
    gens.push_back(row.gen);
  }
  return challenge_score(truth, predicted, gens).final_score;
}

TwoStepConfig twostep_at(const ParameterGrid& grid, std::span<const double> p, TwoStepConfig cfg) {
  const auto get = [&](std::string_view name, double fallback) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i].name == name) return p[i];
    }
    return fallback;
  };
  cfg.healthy.t_min = get("t_min", cfg.healthy.t_min);
  cfg.healthy.t_mean = get("t_mean", cfg.healthy.t_mean);
  cfg.healthy.t_max = get("t_max", cfg.healthy.t_max);
  cfg.aux_lo = get("aux_lo", cfg.aux_lo);
  cfg.aux_hi = get("aux_hi", cfg.aux_hi);
  cfg.boundary_shift_limit =
      static_cast<int>(std::lround(get("boundary_shift_limit", cfg.boundary_shift_limit)));
  return cfg;
}

}  // namespace

GridSearchResult grid_search(
    const ParameterGrid& grid,
    const std::function<std::optional<double>(std::span<const double>)>& evaluate) {
  if (grid.empty()) throw Error(ErrorKind::Config, "empty calibration grid");
  for (const auto& axis : grid) {
    if (axis.values.empty()) {
      throw Error(ErrorKind::Config, "calibration axis '" + axis.name + "' has no values");
    }
  }
  std::vector<std::size_t> cursor(grid.size(), 0);
  std::vector<double> point(grid.size());
  std::optional<GridSearchResult> best;
  while (true) {
    for (std::size_t i = 0; i < grid.size(); ++i) point[i] = grid[i].values[cursor[i]];
    if (const auto score = evaluate(point)) {
      const bool better = !best || *score > best->score ||
                          (*score == best->score && std::lexicographical_compare(
                                                        point.begin(), point.end(),
                                                        best->point.begin(), best->point.end()));
      if (better) best = GridSearchResult{point, *score};
    }
    std::size_t axis = grid.size();
    while (axis-- > 0) {
      if (++cursor[axis] < grid[axis].values.size()) break;
      cursor[axis] = 0;
    }
    if (axis == static_cast<std::size_t>(-1)) break;
  }
  if (!best) throw Error(ErrorKind::Config, "calibration grid has no feasible point");
  return *best;
}

ParameterGrid default_twostep_grid() {
  return {
      {"t_min", {0.3, 0.5, 0.7}},
      {"t_mean", {0.3, 0.5, 0.7}},
      {"t_max", {0.5, 0.7, 0.9}},
      {"aux_lo", {0.1, 0.3, 0.5}},
      {"aux_hi", {0.5, 0.7, 0.9}},
      {"boundary_shift_limit", {1, 2, 3}},
  };
}

ParameterGrid default_jump_grid() {
  return {{"healthy_threshold", {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}}};
}

ParameterGrid default_pseudolabel_grid() { return {{"confidence_fraction", {0.5}}}; }

ValidationSplit make_validation_split(const FleetTable& train, double fraction,
                                      std::uint64_t seed) {
  if (!train.has_labels) throw Error(ErrorKind::Split, "validation split needs a labeled table");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::Split, "validation fraction must lie in (0, 1)");
  }
  const auto spans = truck_spans(train);
  std::vector<std::size_t> groups[2];  // healthy, failed
  for (std::size_t t = 0; t < spans.size(); ++t) {
    const auto failure = implied_failure(train, spans[t]);
    if (eligible_window_ends(train, spans[t], failure).empty()) continue;
    groups[failure ? 1 : 0].push_back(t);
  }
  auto rng = make_rng(seed, kValidationStream);
  std::vector<bool> held_out(spans.size(), false);
  for (auto& group : groups) {
    std::shuffle(group.begin(), group.end(), rng);
    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * double(group.size()))));
    if (group.size() < 2 || n >= group.size()) {
      throw Error(ErrorKind::Split, "too few trucks to hold out a validation split");
    }
    for (std::size_t i = 0; i < n; ++i) held_out[group[i]] = true;
  }

  ValidationSplit split;
  split.fit.n_features = train.n_features;
  split.fit.has_labels = true;
  split.validation.n_features = train.n_features;
  split.truth.has_labels = true;
  for (std::size_t t = 0; t < spans.size(); ++t) {
    const auto& span = spans[t];
    if (!held_out[t]) {
      split.fit.rows.insert(split.fit.rows.end(),
                            train.rows.begin() + static_cast<std::ptrdiff_t>(span.begin),
                            train.rows.begin() + static_cast<std::ptrdiff_t>(span.end));
      continue;
    }
    auto window_rng = make_rng(derive_seed(seed, kValidationStream), t);
    const auto window =
        extract_test_window(train, span, implied_failure(train, span), window_rng);
    for (std::size_t i = 0; i < window.length(); ++i) {
      Readout row;
      row.timestep = window.start_timestep + static_cast<int>(i);
      row.chassis_id = window.chassis_id;
      row.gen = window.gen;
      Readout truth = row;
      truth.risk_level = window.labels[i];
      row.features = window.rows[i];
      split.validation.rows.push_back(std::move(row));
      split.truth.rows.push_back(std::move(truth));
    }
  }
  return split;
}

CalibrationResult calibrate_thresholds(StrategyKind kind, const FleetTable& train,
                                       const StrategySettings& base,
                                       const CalibrationOptions& options) {
  const auto split = make_validation_split(train, options.validation_fraction, base.seed);
  const auto windows = table_windows(split.validation);
  CalibrationResult result;
  result.settings = base;

  switch (kind) {
    case StrategyKind::TwoStep: {
      const auto& grid = options.twostep_grid;
      check_axes(grid, {"t_min", "t_mean", "t_max", "aux_lo", "aux_hi", "boundary_shift_limit"});
      if (grid.empty()) throw Error(ErrorKind::Config, "empty calibration grid");
      const auto model = twostep_fit(split.fit, base);
      const auto scores = twostep_score(model, windows, base);
      const auto best = grid_search(grid, [&](std::span<const double> p) -> std::optional<double> {
        const auto cfg = twostep_at(grid, p, base.twostep);
        if (cfg.aux_lo > cfg.aux_hi) return std::nullopt;
        return validation_score(split, twostep_decide(scores, windows, cfg));
      });
      result.settings.twostep = twostep_at(grid, best.point, base.twostep);
      result.point = best.point;
      result.validation_score = best.score;
      break;
    }
    case StrategyKind::Jump: {
      const auto& grid = options.jump_grid;
      check_axes(grid, {"healthy_threshold"});
      if (grid.empty()) throw Error(ErrorKind::Config, "empty calibration grid");
      const auto axis = axis_index(grid, "healthy_threshold");
      const auto model = jump_fit(split.fit, base);
      const auto scores = jump_score(model, windows, base);
      const auto best = grid_search(grid, [&](std::span<const double> p) -> std::optional<double> {
        return validation_score(split, jump_decide(scores, windows, JumpConfig{p[axis]}));
      });
      result.settings.jump.healthy_threshold = best.point[axis];
      result.point = best.point;
      result.validation_score = best.score;
      break;
    }
    case StrategyKind::PseudoLabel: {
      const auto& grid = options.pseudolabel_grid;
      check_axes(grid, {"confidence_fraction"});
      if (grid.empty()) throw Error(ErrorKind::Config, "empty calibration grid");
      const auto axis = axis_index(grid, "confidence_fraction");
      const auto best = grid_search(grid, [&](std::span<const double> p) -> std::optional<double> {
        auto settings = base;
        settings.pseudolabel.confidence_fraction = p[axis];
        return validation_score(split,
                                pseudolabel_train_predict(split.fit, split.validation, settings));
      });
      result.settings.pseudolabel.confidence_fraction = best.point[axis];
      result.point = best.point;
      result.validation_score = best.score;
      break;
    }
    case StrategyKind::TreeBaseline:
    case StrategyKind::Oracle:
      throw Error(ErrorKind::Config,
                  "strategy '" + std::string(to_string(kind)) + "' has nothing to calibrate");
  }
  return result;
}

}  // namespace fleetrisk

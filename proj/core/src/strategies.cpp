#include "fleetrisk/strategies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "fleetrisk/error.hpp"
#include "fleetrisk/labeling.hpp"

namespace fleetrisk {
namespace {

constexpr std::uint64_t kHealthStream = 0x4ea1;
constexpr std::uint64_t kAuxStream = 0xa0c;
constexpr std::uint64_t kScoreStream = 0x5c0e;
constexpr std::uint64_t kJumpStream = 0x1a3b;
constexpr std::uint64_t kPseudoStream = 0x95e0;
// Rows this close to failure count as "very high" risk for the auxiliary model.
constexpr int kVeryHighHorizon = 2;

struct TruckInfo {
  TruckSpan span;
  std::optional<int> failure;
};

std::vector<TruckInfo> train_trucks(const FleetTable& train) {
  if (!train.has_labels) throw Error(ErrorKind::Strategy, "training table must be labeled");
  std::vector<TruckInfo> trucks;
  for (const auto& span : truck_spans(train)) {
    trucks.push_back({span, implied_failure(train, span)});
  }
  return trucks;
}

void require_failed_truck(const std::vector<TruckInfo>& trucks) {
  const bool any = std::any_of(trucks.begin(), trucks.end(),
                               [](const TruckInfo& t) { return t.failure.has_value(); });
  if (!any) throw Error(ErrorKind::Strategy, "training data has no unhealthy sequence");
}

std::vector<double> with_timestep(int timestep, std::span<const double> features) {
  std::vector<double> x;
  x.reserve(features.size() + 1);
  x.push_back(double(timestep));
  x.insert(x.end(), features.begin(), features.end());
  return x;
}

// Weights that give both classes the same total mass.
std::vector<double> balanced_weights(std::span<const int> y) {
  const auto positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const auto negatives = double(y.size()) - positives;
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    w[i] = double(y.size()) / (2.0 * (y[i] == 1 ? positives : negatives));
  }
  return w;
}

FeedForwardNet fit_binary(const Dataset& x, std::span<const int> y, const TrainingHyper& hyper,
                          bool balance) {
  const auto weights = balance ? balanced_weights(y) : std::vector<double>{};
  return hyper.hidden_sizes.empty() ? fit_logistic(x, y, hyper, weights)
                                    : fit_mlp(x, y, hyper, weights);
}

TrainingHyper seeded(const TrainingHyper& hyper, std::uint64_t seed, std::uint64_t stream) {
  TrainingHyper out = hyper;
  out.seed = derive_seed(seed, stream);
  return out;
}

std::vector<RiskLabel> concat(const std::vector<std::vector<RiskLabel>>& parts) {
  std::vector<RiskLabel> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

FeatureOptions row_channels(const FeatureOptions& options) {
  FeatureOptions rows = options;
  rows.include_wavelet = false;
  rows.include_variants = false;
  return rows;
}

}  // namespace

void validate(const TwoStepConfig& cfg) {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(cfg.healthy.t_min) || !in_unit(cfg.healthy.t_mean) || !in_unit(cfg.healthy.t_max) ||
      !in_unit(cfg.aux_hi) || !in_unit(cfg.aux_lo)) {
    throw Error(ErrorKind::Config, "two-step thresholds must lie in [0, 1]");
  }
  if (cfg.aux_lo > cfg.aux_hi) throw Error(ErrorKind::Config, "aux_lo must not exceed aux_hi");
  if (cfg.boundary_shift_limit < 0) {
    throw Error(ErrorKind::Config, "boundary_shift_limit must be >= 0");
  }
}

void validate(const JumpConfig& cfg) {
  if (!(cfg.healthy_threshold >= 0.0 && cfg.healthy_threshold <= 1.0)) {
    throw Error(ErrorKind::Config, "healthy_threshold must lie in [0, 1]");
  }
}

void validate(const PseudoLabelConfig& cfg) {
  if (cfg.n_iterations < 1) throw Error(ErrorKind::Config, "n_iterations must be positive");
  if (cfg.capacity_schedule.size() != static_cast<std::size_t>(cfg.n_iterations)) {
    throw Error(ErrorKind::Config, "capacity_schedule needs one entry per iteration");
  }
  std::size_t previous = 0;
  for (const auto& sizes : cfg.capacity_schedule) {
    const auto total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (total < previous) throw Error(ErrorKind::Config, "capacity_schedule must not shrink");
    previous = total;
  }
  if (!(cfg.confidence_fraction > 0.0 && cfg.confidence_fraction <= 1.0)) {
    throw Error(ErrorKind::Config, "confidence_fraction must lie in (0, 1]");
  }
  if (cfg.mirror_passes == 0) throw Error(ErrorKind::Config, "mirror_passes must be positive");
}

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::TwoStep: return "twostep";
    case StrategyKind::Jump: return "jump";
    case StrategyKind::PseudoLabel: return "pseudolabel";
    case StrategyKind::TreeBaseline: return "tree-baseline";
    case StrategyKind::Oracle: return "oracle";
  }
  return "twostep";
}

StrategyKind parse_strategy(std::string_view name) {
  for (auto kind : {StrategyKind::TwoStep, StrategyKind::Jump, StrategyKind::PseudoLabel,
                    StrategyKind::TreeBaseline, StrategyKind::Oracle}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorKind::Config, "unknown strategy '" + std::string(name) + "'");
}

HealthDecision healthy_decision(std::span<const double> row_scores, const TwoStepConfig& cfg) {
  if (row_scores.empty()) throw Error(ErrorKind::Domain, "no row scores for the sequence");
  const auto [lo, hi] = std::minmax_element(row_scores.begin(), row_scores.end());
  const double mean =
      std::accumulate(row_scores.begin(), row_scores.end(), 0.0) / double(row_scores.size());
  const bool healthy =
      *lo < cfg.healthy.t_min && mean < cfg.healthy.t_mean && *hi < cfg.healthy.t_max;
  return healthy ? HealthDecision::Healthy : HealthDecision::NonHealthy;
}

std::vector<RiskLabel> jump_labels(std::size_t medium_count, std::size_t length) {
  medium_count = std::min(medium_count, length);
  std::vector<RiskLabel> labels(length, RiskLabel::High);
  std::fill_n(labels.begin(), medium_count, RiskLabel::Medium);
  return labels;
}

std::vector<RiskLabel> baseline_73(std::size_t seq_len) {
  if (seq_len == 0) throw Error(ErrorKind::Domain, "sequence length must be positive");
  const std::size_t highs = std::min<std::size_t>(7, seq_len);
  return jump_labels(seq_len - highs, seq_len);
}

std::vector<RiskLabel> adjust_with_aux(std::span<const RiskLabel> baseline, double aux_max,
                                       const TwoStepConfig& cfg) {
  const auto length = static_cast<long>(baseline.size());
  long highs = static_cast<long>(std::count(baseline.begin(), baseline.end(), RiskLabel::High));
  if (aux_max >= cfg.aux_hi) {
    highs += cfg.boundary_shift_limit;
  } else if (aux_max <= cfg.aux_lo) {
    highs -= cfg.boundary_shift_limit;
  }
  highs = std::clamp(highs, 0L, length);
  return jump_labels(static_cast<std::size_t>(length - highs), baseline.size());
}

std::size_t percentile_to_split(double p, std::size_t length) {
  if (length == 0) throw Error(ErrorKind::Domain, "sequence length must be positive");
  const double k = std::floor(p * double(length));
  if (!(k > 0.0)) return 0;
  return std::min(length, static_cast<std::size_t>(k));
}

double jump_target(std::span<const RiskLabel> labels) {
  if (labels.empty()) throw Error(ErrorKind::TargetConstruction, "empty label window");
  std::size_t mediums = 0;
  bool seen_high = false;
  for (auto label : labels) {
    if (label == RiskLabel::Low) {
      throw Error(ErrorKind::TargetConstruction, "window contains Low rows");
    }
    if (label == RiskLabel::High) {
      seen_high = true;
    } else if (seen_high) {
      throw Error(ErrorKind::TargetConstruction, "window steps down from High to Medium");
    } else {
      ++mediums;
    }
  }
  return double(mediums) / double(labels.size());
}

std::vector<RiskLabel> enforce_monotonic_risk(std::span<const RiskLabel> labels) {
  std::vector<RiskLabel> out(labels.begin(), labels.end());
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = max_risk(out[i - 1], out[i]);
  return out;
}

RiskLabel majority_vote(std::span<const RiskLabel> votes) {
  if (votes.empty()) throw Error(ErrorKind::Domain, "no votes");
  std::size_t counts[kNumRiskClasses] = {};
  for (auto v : votes) ++counts[class_index(v)];
  int best = 0;
  for (int c = 1; c < kNumRiskClasses; ++c) {
    if (counts[c] >= counts[best]) best = c;
  }
  return label_from_index(best);
}

bool is_single_jump_or_low(std::span<const RiskLabel> labels) {
  if (std::all_of(labels.begin(), labels.end(),
                  [](RiskLabel l) { return l == RiskLabel::Low; })) {
    return true;
  }
  bool seen_high = false;
  for (auto label : labels) {
    if (label == RiskLabel::Low) return false;
    if (label == RiskLabel::High) {
      seen_high = true;
    } else if (seen_high) {
      return false;
    }
  }
  return true;
}

std::vector<SequenceWindow> table_windows(const FleetTable& table) {
  std::vector<SequenceWindow> windows;
  for (const auto& span : truck_spans(table)) {
    SequenceWindow w;
    w.chassis_id = table.rows[span.begin].chassis_id;
    w.gen = table.rows[span.begin].gen;
    w.start_timestep = table.rows[span.begin].timestep;
    for (std::size_t i = span.begin; i < span.end; ++i) {
      w.rows.push_back(table.rows[i].features);
      if (table.rows[i].risk_level) w.labels.push_back(*table.rows[i].risk_level);
    }
    if (w.labels.size() != w.rows.size()) w.labels.clear();
    windows.push_back(std::move(w));
  }
  return windows;
}

// ---------------------------------------------------------------------------
// Two-step

TwoStepModel twostep_fit(const FleetTable& train, const StrategySettings& settings) {
  const auto trucks = train_trucks(train);
  require_failed_truck(trucks);

  // Stage 1: rows of always-Low sequences against Medium/High rows of failing
  // ones. Low rows of failing trucks are left out.
  Dataset health_x(train.n_features + 1);
  std::vector<int> health_y;
  // Auxiliary: rows of failing sequences with at least 10 readouts, target
  // "within two steps of failure", timestep excluded.
  Dataset aux_x(train.n_features);
  std::vector<int> aux_y;
  for (const auto& truck : trucks) {
    for (std::size_t i = truck.span.begin; i < truck.span.end; ++i) {
      const auto& row = train.rows[i];
      if (!truck.failure) {
        health_x.push_row(with_timestep(row.timestep, row.features));
        health_y.push_back(0);
        continue;
      }
      if (*row.risk_level != RiskLabel::Low) {
        health_x.push_row(with_timestep(row.timestep, row.features));
        health_y.push_back(1);
      }
      if (truck.span.size() >= kWindowLength) {
        aux_x.push_row(row.features);
        aux_y.push_back(*truck.failure - row.timestep < kVeryHighHorizon ? 1 : 0);
      }
    }
  }
  if (aux_x.empty()) {
    throw Error(ErrorKind::Strategy, "no unhealthy sequence with at least 10 rows");
  }
  if (std::count(health_y.begin(), health_y.end(), 0) == 0) {
    throw Error(ErrorKind::Strategy, "training data has no healthy sequence");
  }
  const auto& lc = settings.learners;
  TwoStepModel model;
  model.health = ensemble_fit(health_x, health_y, lc.n_models,
                              seeded(lc.hyper, settings.seed, kHealthStream));
  model.aux = ensemble_fit(aux_x, aux_y, lc.n_models, seeded(lc.hyper, settings.seed, kAuxStream));
  return model;
}

TwoStepScores twostep_score(const TwoStepModel& model, const std::vector<SequenceWindow>& windows,
                            const StrategySettings& settings) {
  TwoStepScores scores;
  const auto n_draws = settings.learners.n_draws;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& window = windows[w];
    auto rng = make_rng(derive_seed(settings.seed, kScoreStream), w);
    std::vector<double> health;
    double aux_max = 0.0;
    for (std::size_t i = 0; i < window.length(); ++i) {
      const int t = window.start_timestep + static_cast<int>(i);
      health.push_back(ensemble_score(model.health, with_timestep(t, window.rows[i]), n_draws, rng));
      aux_max = std::max(aux_max, ensemble_score(model.aux, window.rows[i], n_draws, rng));
    }
    scores.health.push_back(std::move(health));
    scores.aux_max.push_back(aux_max);
  }
  return scores;
}

std::vector<RiskLabel> twostep_decide(const TwoStepScores& scores,
                                      const std::vector<SequenceWindow>& windows,
                                      const TwoStepConfig& cfg) {
  std::vector<std::vector<RiskLabel>> parts;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto length = windows[w].length();
    if (healthy_decision(scores.health[w], cfg) == HealthDecision::Healthy) {
      parts.emplace_back(length, RiskLabel::Low);
    } else {
      parts.push_back(adjust_with_aux(baseline_73(length), scores.aux_max[w], cfg));
    }
  }
  return concat(parts);
}

std::vector<RiskLabel> twostep_predict(const FleetTable& train, const FleetTable& test,
                                       const StrategySettings& settings) {
  validate(settings.twostep);
  const auto model = twostep_fit(train, settings);
  const auto windows = table_windows(test);
  return twostep_decide(twostep_score(model, windows, settings), windows, settings.twostep);
}

// ---------------------------------------------------------------------------
// Jump

JumpModel jump_fit(const FleetTable& train, const StrategySettings& settings) {
  const auto trucks = train_trucks(train);
  require_failed_truck(trucks);
  validate(settings.features);

  TrainingWindowOptions window_options;
  window_options.policy = WindowPolicy::UnhealthyAnchored;
  const auto windows =
      extract_training_windows(train, window_options, derive_seed(settings.seed, kJumpStream))
          .windows;
  const auto row_options = row_channels(settings.features);

  Dataset health_x;
  std::vector<int> health_y;
  Dataset jump_x;
  std::vector<double> jump_y;
  for (const auto& window : windows) {
    const bool unhealthy = std::any_of(window.labels.begin(), window.labels.end(),
                                       [](RiskLabel l) { return l != RiskLabel::Low; });
    const auto rows = build_feature_matrix(window, row_options);
    for (std::size_t i = 0; i < rows.n_rows; ++i) {
      health_x.push_row(rows.row(i));
      health_y.push_back(unhealthy ? 1 : 0);
    }
    if (unhealthy) {
      jump_x.push_row(build_feature_matrix(window, settings.features).flat);
      jump_y.push_back(jump_target(window.labels));
    }
  }
  const auto& hyper = settings.learners.hyper;
  JumpModel model;
  model.health = fit_binary(health_x, health_y, seeded(hyper, settings.seed, kHealthStream), true);
  model.jump = fit_regressor(jump_x, jump_y, seeded(hyper, settings.seed, kJumpStream));
  return model;
}

JumpScores jump_score(const JumpModel& model, const std::vector<SequenceWindow>& windows,
                      const StrategySettings& settings) {
  const auto row_options = row_channels(settings.features);
  JumpScores scores;
  for (const auto& window : windows) {
    const auto rows = build_feature_matrix(window, row_options);
    double sum = 0.0;
    for (std::size_t i = 0; i < rows.n_rows; ++i) sum += model.health.score(rows.row(i));
    scores.health_mean.push_back(sum / double(rows.n_rows));
    scores.jump.push_back(model.jump.score(build_feature_matrix(window, settings.features).flat));
  }
  return scores;
}

std::vector<RiskLabel> jump_decide(const JumpScores& scores,
                                   const std::vector<SequenceWindow>& windows,
                                   const JumpConfig& cfg) {
  std::vector<std::vector<RiskLabel>> parts;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto length = windows[w].length();
    if (scores.health_mean[w] <= cfg.healthy_threshold) {
      parts.emplace_back(length, RiskLabel::Low);
    } else {
      parts.push_back(jump_labels(percentile_to_split(scores.jump[w], length), length));
    }
  }
  return concat(parts);
}

std::vector<RiskLabel> jump_predict(const FleetTable& train, const FleetTable& test,
                                    const StrategySettings& settings) {
  validate(settings.jump);
  const auto model = jump_fit(train, settings);
  const auto windows = table_windows(test);
  return jump_decide(jump_score(model, windows, settings), windows, settings.jump);
}

// ---------------------------------------------------------------------------
// Pseudo-labeling

std::vector<std::vector<double>> pseudolabel_row_features(const SequenceWindow& window) {
  FeatureOptions options;
  options.include_raw = true;
  options.include_derivative = window.length() >= 2;
  options.include_wavelet = false;
  const auto m = build_feature_matrix(window, options);
  const std::size_t n_features = window.rows.front().size();
  std::vector<double> mean(n_features, 0.0);
  for (const auto& row : window.rows) {
    for (std::size_t k = 0; k < n_features; ++k) mean[k] += row[k] / double(window.length());
  }
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    const auto r = m.row(i);
    std::vector<double> x(r.begin(), r.end());
    x.push_back(window.length() > 1 ? double(i) / double(window.length() - 1) : 0.0);
    x.insert(x.end(), mean.begin(), mean.end());
    out.push_back(std::move(x));
  }
  return out;
}

namespace {

struct RowClassifier {
  std::vector<FeedForwardNet> one_vs_rest;  // indexed by class

  std::array<double, kNumRiskClasses> probabilities(std::span<const double> x) const {
    std::array<double, kNumRiskClasses> p{};
    double sum = 0.0;
    for (int c = 0; c < kNumRiskClasses; ++c) {
      p[c] = one_vs_rest[c].score(x);
      sum += p[c];
    }
    for (auto& v : p) v = sum > 0.0 ? v / sum : 1.0 / kNumRiskClasses;
    return p;
  }
};

RiskLabel argmax_label(const std::array<double, kNumRiskClasses>& p) {
  int best = 0;
  for (int c = 1; c < kNumRiskClasses; ++c) {
    if (p[c] >= p[best]) best = c;
  }
  return label_from_index(best);
}

RowClassifier fit_row_classifier(const Dataset& x, const std::vector<RiskLabel>& y,
                                 const TrainingHyper& hyper) {
  RowClassifier model;
  for (int c = 0; c < kNumRiskClasses; ++c) {
    std::vector<int> target(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) target[i] = class_index(y[i]) == c ? 1 : 0;
    model.one_vs_rest.push_back(
        fit_binary(x, target, seeded(hyper, hyper.seed, static_cast<std::uint64_t>(c)), true));
  }
  return model;
}

}  // namespace

std::vector<RiskLabel> pseudolabel_train_predict(const FleetTable& train, const FleetTable& test,
                                                 const StrategySettings& settings) {
  const auto& cfg = settings.pseudolabel;
  validate(cfg);
  const auto trucks = train_trucks(train);
  require_failed_truck(trucks);

  Dataset base_x;
  std::vector<RiskLabel> base_y;
  TrainingWindowOptions mirror;
  mirror.policy = WindowPolicy::MirrorTest;
  for (std::size_t pass = 0; pass < cfg.mirror_passes; ++pass) {
    const auto windows =
        extract_training_windows(train, mirror, derive_seed(settings.seed, kPseudoStream + pass))
            .windows;
    for (const auto& window : windows) {
      const auto rows = pseudolabel_row_features(window);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        base_x.push_row(rows[i]);
        base_y.push_back(window.labels[i]);
      }
    }
  }

  const auto windows = table_windows(test);
  std::vector<std::vector<std::vector<double>>> test_rows;
  for (const auto& w : windows) test_rows.push_back(pseudolabel_row_features(w));

  const auto n_select =
      static_cast<std::size_t>(std::floor(cfg.confidence_fraction * double(windows.size())));
  if (cfg.n_iterations > 1 && n_select == 0) {
    throw Error(ErrorKind::Config, "confidence_fraction selects no test sequence");
  }

  // votes[w][i] holds one label per iteration.
  std::vector<std::vector<std::vector<RiskLabel>>> votes(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) votes[w].resize(windows[w].length());

  Dataset train_x = base_x;
  std::vector<RiskLabel> train_y = base_y;
  for (int it = 0; it < cfg.n_iterations; ++it) {
    TrainingHyper hyper = seeded(settings.learners.hyper, settings.seed,
                                 kPseudoStream + 0x100 + static_cast<std::uint64_t>(it));
    hyper.hidden_sizes = cfg.capacity_schedule[static_cast<std::size_t>(it)];
    hyper.dropout_rate = 0.0;
    const auto model = fit_row_classifier(train_x, train_y, hyper);

    std::vector<std::vector<RiskLabel>> predicted(windows.size());
    std::vector<double> confidence(windows.size(), 0.0);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      for (std::size_t i = 0; i < test_rows[w].size(); ++i) {
        const auto p = model.probabilities(test_rows[w][i]);
        predicted[w].push_back(argmax_label(p));
        confidence[w] += *std::max_element(p.begin(), p.end()) / double(test_rows[w].size());
        votes[w][i].push_back(predicted[w].back());
      }
    }
    if (it + 1 == cfg.n_iterations) break;

    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (cfg.prioritize_gen2 && windows[a].gen != windows[b].gen) {
        return windows[a].gen == Generation::Gen2;
      }
      return confidence[a] > confidence[b];
    });
    train_x = base_x;
    train_y = base_y;
    for (std::size_t s = 0; s < n_select; ++s) {
      const auto w = order[s];
      const auto labels = enforce_monotonic_risk(predicted[w]);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        train_x.push_row(test_rows[w][i]);
        train_y.push_back(labels[i]);
      }
    }
  }

  std::vector<std::vector<RiskLabel>> parts;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    std::vector<RiskLabel> labels;
    for (const auto& row_votes : votes[w]) labels.push_back(majority_vote(row_votes));
    parts.push_back(enforce_monotonic_risk(labels));
  }
  return concat(parts);
}

// ---------------------------------------------------------------------------
// Reference predictors

std::vector<RiskLabel> tree_baseline_predict(const FleetTable& train, const FleetTable& test,
                                             const StrategySettings& settings) {
  if (!train.has_labels) throw Error(ErrorKind::Strategy, "training table must be labeled");
  Dataset x(train.n_features);
  std::vector<RiskLabel> y;
  for (const auto& row : train.rows) {
    x.push_row(row.features);
    y.push_back(*row.risk_level);
  }
  const auto tree = fit_tree_baseline(x, y, settings.learners.tree_depth);
  std::vector<RiskLabel> out;
  for (const auto& row : test.rows) out.push_back(tree.predict(row.features));
  return out;
}

std::vector<RiskLabel> oracle_predict(const FleetTable& test, const FailureMap& failures) {
  std::vector<RiskLabel> out;
  for (const auto& row : test.rows) {
    const auto it = failures.find(row.chassis_id);
    if (it == failures.end()) {
      throw Error(ErrorKind::Mapping, "chassis '" + row.chassis_id + "' has no failure entry");
    }
    std::optional<int> ttf;
    if (it->second) ttf = *it->second - row.timestep;
    out.push_back(assign_risk_label(ttf));
  }
  return out;
}

std::vector<RiskLabel> predict(StrategyKind kind, const FleetTable& train, const FleetTable& test,
                               const StrategySettings& settings, const FailureMap* failures) {
  switch (kind) {
    case StrategyKind::TwoStep: return twostep_predict(train, test, settings);
    case StrategyKind::Jump: return jump_predict(train, test, settings);
    case StrategyKind::PseudoLabel: return pseudolabel_train_predict(train, test, settings);
    case StrategyKind::TreeBaseline: return tree_baseline_predict(train, test, settings);
    case StrategyKind::Oracle:
      if (!failures) throw Error(ErrorKind::Strategy, "the oracle needs the failure map");
      return oracle_predict(test, *failures);
  }
  throw Error(ErrorKind::Strategy, "unhandled strategy");
}

}  // namespace fleetrisk

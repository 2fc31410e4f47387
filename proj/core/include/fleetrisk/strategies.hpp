#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fleetrisk/features.hpp"
#include "fleetrisk/learners.hpp"
#include "fleetrisk/types.hpp"

namespace fleetrisk {

// ---------------------------------------------------------------------------
// Configuration

struct LearnerConfig {
  TrainingHyper hyper{.learning_rate = 0.5,
                      .epochs = 200,
                      .l2 = 1e-3,
                      .hidden_sizes = {8},
                      .dropout_rate = 0.1,
                      .seed = 1};
  std::size_t n_models = 5;
  std::size_t n_draws = 20;
  int tree_depth = 6;
};

struct HealthyThresholds {
  double t_min = 0.5;
  double t_mean = 0.5;
  double t_max = 0.5;
};

struct TwoStepConfig {
  HealthyThresholds healthy;
  double aux_hi = 0.6;
  double aux_lo = 0.2;
  int boundary_shift_limit = 2;
};

struct JumpConfig {
  double healthy_threshold = 0.5;
};

struct PseudoLabelConfig {
  int n_iterations = 3;
  // Hidden layer sizes per iteration; total size must not decrease.
  std::vector<std::vector<std::size_t>> capacity_schedule = {{8}, {12}, {16, 8}};
  double confidence_fraction = 0.5;
  bool prioritize_gen2 = true;
  // Number of independent mirror-test window draws per training truck.
  std::size_t mirror_passes = 4;
};

void validate(const TwoStepConfig& cfg);
void validate(const JumpConfig& cfg);
void validate(const PseudoLabelConfig& cfg);

enum class StrategyKind { TwoStep, Jump, PseudoLabel, TreeBaseline, Oracle };

std::string_view to_string(StrategyKind kind);
// Accepts "twostep", "jump", "pseudolabel", "tree-baseline", "oracle".
// Throws ErrorKind::Config for unregistered names.
StrategyKind parse_strategy(std::string_view name);

struct StrategySettings {
  LearnerConfig learners;
  FeatureOptions features;
  TwoStepConfig twostep;
  JumpConfig jump;
  PseudoLabelConfig pseudolabel;
  std::uint64_t seed = 42;
};

// ---------------------------------------------------------------------------
// Sequence-level rules

enum class HealthDecision { Healthy, NonHealthy };

// Healthy iff min, mean and max of the non-healthiness scores are all below
// their thresholds.
HealthDecision healthy_decision(std::span<const double> row_scores, const TwoStepConfig& cfg);

// Last min(7, L) elements High, the rest Medium.
std::vector<RiskLabel> baseline_73(std::size_t seq_len);

// Moves the Medium/High boundary by boundary_shift_limit steps: earlier
// (more High) when aux_max >= aux_hi, later when aux_max <= aux_lo.
std::vector<RiskLabel> adjust_with_aux(std::span<const RiskLabel> baseline, double aux_max,
                                       const TwoStepConfig& cfg);

// k leading Mediums then L - k Highs.
std::vector<RiskLabel> jump_labels(std::size_t medium_count, std::size_t length);

// k = floor(p * L) clamped to [0, L].
std::size_t percentile_to_split(double p, std::size_t length);

// (number of Medium) / L for a window that is Medium* High*. Throws
// ErrorKind::TargetConstruction for Low rows or a High -> Medium step.
double jump_target(std::span<const RiskLabel> labels);

// Running maximum in the Low < Medium < High order.
std::vector<RiskLabel> enforce_monotonic_risk(std::span<const RiskLabel> labels);

// Plurality vote; ties resolve to the higher risk.
RiskLabel majority_vote(std::span<const RiskLabel> votes);

// True when the labels are all Low, or a (possibly empty) run of Medium
// followed by a run of High.
bool is_single_jump_or_low(std::span<const RiskLabel> labels);

// Splits an unlabeled test table into its per-truck windows (table order).
std::vector<SequenceWindow> table_windows(const FleetTable& table);

// ---------------------------------------------------------------------------
// Two-step strategy

struct TwoStepModel {
  StochasticEnsemble health;  // P(row belongs to a non-healthy sequence)
  StochasticEnsemble aux;     // P(row is within 2 steps of failure)
};

struct TwoStepScores {
  std::vector<std::vector<double>> health;  // per window, per row
  std::vector<double> aux_max;              // per window
};

// Throws ErrorKind::Strategy when the training table has no failed truck.
TwoStepModel twostep_fit(const FleetTable& train, const StrategySettings& settings);
TwoStepScores twostep_score(const TwoStepModel& model, const std::vector<SequenceWindow>& windows,
                            const StrategySettings& settings);
std::vector<RiskLabel> twostep_decide(const TwoStepScores& scores,
                                      const std::vector<SequenceWindow>& windows,
                                      const TwoStepConfig& cfg);
std::vector<RiskLabel> twostep_predict(const FleetTable& train, const FleetTable& test,
                                       const StrategySettings& settings);

// ---------------------------------------------------------------------------
// Jump strategy

struct JumpModel {
  FeedForwardNet health;  // per-row score of belonging to a non-healthy window
  FeedForwardNet jump;    // flat window features -> Medium share of the window
};

struct JumpScores {
  std::vector<double> health_mean;  // per window
  std::vector<double> jump;         // per window, in (0, 1)
};

JumpModel jump_fit(const FleetTable& train, const StrategySettings& settings);
JumpScores jump_score(const JumpModel& model, const std::vector<SequenceWindow>& windows,
                      const StrategySettings& settings);
std::vector<RiskLabel> jump_decide(const JumpScores& scores,
                                   const std::vector<SequenceWindow>& windows,
                                   const JumpConfig& cfg);
std::vector<RiskLabel> jump_predict(const FleetTable& train, const FleetTable& test,
                                    const StrategySettings& settings);

// ---------------------------------------------------------------------------
// Pseudo-label strategy

// Per-row features for the per-row classifier: raw and derivative channels,
// the relative position inside the window, and the window mean of every raw
// feature.
std::vector<std::vector<double>> pseudolabel_row_features(const SequenceWindow& window);

// Throws ErrorKind::Config when confidence_fraction selects no sequence.
std::vector<RiskLabel> pseudolabel_train_predict(const FleetTable& train, const FleetTable& test,
                                                 const StrategySettings& settings);

// ---------------------------------------------------------------------------
// Reference predictors

// Per-row CART on the raw features.
std::vector<RiskLabel> tree_baseline_predict(const FleetTable& train, const FleetTable& test,
                                             const StrategySettings& settings);

// Applies the labeling rule to the known failure times.
std::vector<RiskLabel> oracle_predict(const FleetTable& test, const FailureMap& failures);

// Dispatches on `kind`. The oracle needs `failures`; the others ignore it.
std::vector<RiskLabel> predict(StrategyKind kind, const FleetTable& train, const FleetTable& test,
                               const StrategySettings& settings,
                               const FailureMap* failures = nullptr);

}  // namespace fleetrisk

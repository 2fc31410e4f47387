#pragma once

#include <optional>
#include <vector>

#include "fleetrisk/rng.hpp"
#include "fleetrisk/types.hpp"

namespace fleetrisk {

// Label bands, in timesteps to failure: [0, 9) High, [9, 18) Medium, the
// rest (and trucks that never fail) Low.
inline constexpr int kHighHorizon = 9;
inline constexpr int kMediumHorizon = 18;

// ttf = failure timestep - readout timestep; nullopt for healthy trucks.
// Throws ErrorKind::Domain on negative ttf.
RiskLabel assign_risk_label(std::optional<int> ttf);

// Fills risk_level on every row. Throws ErrorKind::Mapping for a chassis that
// is missing from `failures`.
FleetTable label_fleet(const FleetTable& fleet, const FailureMap& failures);

// Failure timestep implied by a labeled truck: the last timestep when any row
// is above Low, otherwise nullopt.
std::optional<int> implied_failure(const FleetTable& labeled, const TruckSpan& span);

// Window of kWindowLength rows ending at `end_timestep` (inclusive), labels
// copied when the table is labeled. Throws ErrorKind::Extraction when the
// window leaves the recorded series.
SequenceWindow window_ending_at(const FleetTable& table, const TruckSpan& span,
                                int end_timestep);

// Timesteps a test window may end at: any High timestep with at least 9
// predecessors for failed trucks, any timestep >= 10 for healthy ones.
std::vector<int> eligible_window_ends(const FleetTable& table, const TruckSpan& span,
                                      std::optional<int> failure);

// Test policy: failed trucks get a window ending at a random High timestep,
// healthy trucks a uniformly random window. Throws ErrorKind::Extraction when
// the series is too short.
SequenceWindow extract_test_window(const FleetTable& table, const TruckSpan& span,
                                   std::optional<int> failure, Rng& rng);

enum class WindowPolicy {
  // One test-style window per truck.
  MirrorTest,
  // Unhealthy trucks: every window ending at or after the first High
  // timestep. Healthy trucks: `healthy_windows_per_truck` random windows.
  UnhealthyAnchored,
};

struct TrainingWindowOptions {
  WindowPolicy policy = WindowPolicy::UnhealthyAnchored;
  std::size_t healthy_windows_per_truck = 3;
};

struct WindowExtraction {
  std::vector<SequenceWindow> windows;
  std::size_t skipped_trucks = 0;
};

// Trucks shorter than kWindowLength are skipped and counted. Throws
// ErrorKind::Extraction when no truck is eligible.
WindowExtraction extract_training_windows(const FleetTable& labeled,
                                          const TrainingWindowOptions& options,
                                          std::uint64_t seed);

// Converts windows back to a long-format table (rows in window order).
FleetTable windows_to_table(const std::vector<SequenceWindow>& windows, std::size_t n_features,
                            bool with_labels);

}  // namespace fleetrisk

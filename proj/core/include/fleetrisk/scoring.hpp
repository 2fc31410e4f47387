#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fleetrisk/types.hpp"

namespace fleetrisk {

// counts[true][predicted] over the fixed order Low, Medium, High.
struct ConfusionCounts {
  std::array<std::array<std::uint64_t, kNumRiskClasses>, kNumRiskClasses> counts{};

  std::uint64_t total() const;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Throws ErrorKind::Alignment on a length mismatch or empty input.
ConfusionCounts confusion_counts(std::span<const RiskLabel> y_true,
                                 std::span<const RiskLabel> y_pred);

// Per-class F1 with every 0/0 (precision, recall or F1) evaluated as 0.
std::array<double, kNumRiskClasses> per_class_f1(const ConfusionCounts& counts);

// Unweighted mean of per_class_f1 over all three classes, absent ones included.
double macro_f1(const ConfusionCounts& counts);

struct GenerationScore {
  std::array<double, kNumRiskClasses> per_class_f1{};
  double macro_f1 = 0.0;
  std::size_t rows = 0;
};

struct ScoreReport {
  std::map<Generation, GenerationScore> per_gen;
  // Mean of the gen1 and gen2 macro-F1; the present one's macro when only
  // one generation was evaluated.
  double final_score = 0.0;
  bool single_generation = false;

  // Multi-line human-readable summary.
  std::string to_text() const;
  // Single line "gen1=<v> gen2=<v> final=<v>" (absent generations print "na").
  std::string to_record() const;
};

// Throws ErrorKind::Alignment when the three lists differ in length or are empty.
ScoreReport challenge_score(std::span<const RiskLabel> y_true, std::span<const RiskLabel> y_pred,
                            std::span<const Generation> gens);

// Scores a seeded row subsample of round(fraction * N) rows, allocated to the
// generations in proportion to their size. Throws ErrorKind::DegenerateSubsample
// when a generation present in the input would receive no rows, and
// ErrorKind::Domain for fraction outside (0, 1].
ScoreReport dev_phase_score(std::span<const RiskLabel> y_true, std::span<const RiskLabel> y_pred,
                            std::span<const Generation> gens, double fraction,
                            std::uint64_t seed);

}  // namespace fleetrisk

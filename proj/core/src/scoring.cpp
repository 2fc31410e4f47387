#include "fleetrisk/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "fleetrisk/error.hpp"
#include "fleetrisk/rng.hpp"

namespace fleetrisk {
namespace {

double ratio_or_zero(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::string fixed(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", v);
  return buffer;
}

void check_aligned(std::size_t a, std::size_t b, std::size_t c) {
  if (a == 0) throw Error(ErrorKind::Alignment, "nothing to score");
  if (a != b || a != c) {
    throw Error(ErrorKind::Alignment, "truth, prediction and generation lists differ in length (" +
                                          std::to_string(a) + ", " + std::to_string(b) + ", " +
                                          std::to_string(c) + ")");
  }
}

}  // namespace

std::uint64_t ConfusionCounts::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

ConfusionCounts confusion_counts(std::span<const RiskLabel> y_true,
                                 std::span<const RiskLabel> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::Alignment, "truth has " + std::to_string(y_true.size()) +
                                          " rows, prediction " + std::to_string(y_pred.size()));
  }
  if (y_true.empty()) throw Error(ErrorKind::Alignment, "nothing to score");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++c.counts[class_index(y_true[i])][class_index(y_pred[i])];
  }
  return c;
}

std::array<double, kNumRiskClasses> per_class_f1(const ConfusionCounts& c) {
  std::array<double, kNumRiskClasses> f1{};
  for (int k = 0; k < kNumRiskClasses; ++k) {
    double tp = double(c.counts[k][k]);
    double predicted = 0.0;
    double actual = 0.0;
    for (int j = 0; j < kNumRiskClasses; ++j) {
      predicted += double(c.counts[j][k]);
      actual += double(c.counts[k][j]);
    }
    const double precision = ratio_or_zero(tp, predicted);
    const double recall = ratio_or_zero(tp, actual);
    f1[k] = ratio_or_zero(2.0 * precision * recall, precision + recall);
  }
  return f1;
}

double macro_f1(const ConfusionCounts& counts) {
  const auto f1 = per_class_f1(counts);
  return (f1[0] + f1[1] + f1[2]) / double(kNumRiskClasses);
}

std::string ScoreReport::to_text() const {
  std::ostringstream out;
  for (const auto& [gen, score] : per_gen) {
    out << to_string(gen) << ": macro_f1=" << fixed(score.macro_f1) << " rows=" << score.rows
        << " f1[Low]=" << fixed(score.per_class_f1[0])
        << " f1[Medium]=" << fixed(score.per_class_f1[1])
        << " f1[High]=" << fixed(score.per_class_f1[2]) << '\n';
  }
  out << "final=" << fixed(final_score);
  if (single_generation) out << " (single generation)";
  out << '\n';
  return out.str();
}

std::string ScoreReport::to_record() const {
  std::ostringstream out;
  for (auto gen : {Generation::Gen1, Generation::Gen2}) {
    const auto it = per_gen.find(gen);
    out << to_string(gen) << '=' << (it == per_gen.end() ? "na" : fixed(it->second.macro_f1))
        << ' ';
  }
  out << "final=" << fixed(final_score);
  return out.str();
}

ScoreReport challenge_score(std::span<const RiskLabel> y_true, std::span<const RiskLabel> y_pred,
                            std::span<const Generation> gens) {
  check_aligned(y_true.size(), y_pred.size(), gens.size());
  ScoreReport report;
  for (auto gen : {Generation::Gen1, Generation::Gen2}) {
    std::vector<RiskLabel> t;
    std::vector<RiskLabel> p;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (gens[i] != gen) continue;
      t.push_back(y_true[i]);
      p.push_back(y_pred[i]);
    }
    if (t.empty()) continue;
    const auto counts = confusion_counts(t, p);
    GenerationScore score;
    score.per_class_f1 = per_class_f1(counts);
    score.macro_f1 = macro_f1(counts);
    score.rows = t.size();
    report.per_gen.emplace(gen, score);
  }
  double sum = 0.0;
  for (const auto& [gen, score] : report.per_gen) sum += score.macro_f1;
  report.final_score = sum / double(report.per_gen.size());
  report.single_generation = report.per_gen.size() == 1;
  return report;
}

ScoreReport dev_phase_score(std::span<const RiskLabel> y_true, std::span<const RiskLabel> y_pred,
                            std::span<const Generation> gens, double fraction,
                            std::uint64_t seed) {
  check_aligned(y_true.size(), y_pred.size(), gens.size());
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::Domain, "dev-phase fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> rows_of[2];
  for (std::size_t i = 0; i < gens.size(); ++i) {
    rows_of[gens[i] == Generation::Gen1 ? 0 : 1].push_back(i);
  }
  const auto n = gens.size();
  const auto target = static_cast<std::size_t>(std::llround(fraction * double(n)));
  const auto n_gen1 = std::min(
      rows_of[0].size(),
      static_cast<std::size_t>(std::llround(fraction * double(rows_of[0].size()))));
  const std::size_t quota[2] = {n_gen1, std::min(rows_of[1].size(), target - std::min(target, n_gen1))};

  Rng rng(derive_seed(seed, 0xde5));
  std::vector<RiskLabel> t;
  std::vector<RiskLabel> p;
  std::vector<Generation> g;
  for (int k = 0; k < 2; ++k) {
    if (rows_of[k].empty()) continue;
    if (quota[k] == 0) {
      throw Error(ErrorKind::DegenerateSubsample,
                  std::string("subsample leaves no ") + (k == 0 ? "gen1" : "gen2") + " rows");
    }
    auto rows = rows_of[k];
    if (quota[k] < rows.size()) {
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(quota[k]);
      std::sort(rows.begin(), rows.end());
    }
    for (auto i : rows) {
      t.push_back(y_true[i]);
      p.push_back(y_pred[i]);
      g.push_back(gens[i]);
    }
  }
  return challenge_score(t, p, g);
}

}  // namespace fleetrisk

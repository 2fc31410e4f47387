#include "fleetrisk/labeling.hpp"

#include <algorithm>

#include "fleetrisk/error.hpp"

namespace fleetrisk {

RiskLabel assign_risk_label(std::optional<int> ttf) {
  if (!ttf) return RiskLabel::Low;
  if (*ttf < 0) {
    throw Error(ErrorKind::Domain, "negative time to failure " + std::to_string(*ttf));
  }
  if (*ttf < kHighHorizon) return RiskLabel::High;
  if (*ttf < kMediumHorizon) return RiskLabel::Medium;
  return RiskLabel::Low;
}

FleetTable label_fleet(const FleetTable& fleet, const FailureMap& failures) {
  FleetTable labeled = fleet;
  labeled.has_labels = true;
  for (auto& row : labeled.rows) {
    const auto it = failures.find(row.chassis_id);
    if (it == failures.end()) {
      throw Error(ErrorKind::Mapping, "chassis '" + row.chassis_id + "' has no failure entry");
    }
    std::optional<int> ttf;
    if (it->second) ttf = *it->second - row.timestep;
    row.risk_level = assign_risk_label(ttf);
  }
  return labeled;
}

std::optional<int> implied_failure(const FleetTable& labeled, const TruckSpan& span) {
  for (std::size_t i = span.begin; i < span.end; ++i) {
    if (labeled.rows[i].risk_level.value_or(RiskLabel::Low) != RiskLabel::Low) {
      return labeled.rows[span.end - 1].timestep;
    }
  }
  return std::nullopt;
}

SequenceWindow window_ending_at(const FleetTable& table, const TruckSpan& span,
                                int end_timestep) {
  const int first = table.rows[span.begin].timestep;
  const int last = table.rows[span.end - 1].timestep;
  const int start = end_timestep - static_cast<int>(kWindowLength) + 1;
  const auto& id = table.rows[span.begin].chassis_id;
  if (start < first || end_timestep > last) {
    throw Error(ErrorKind::Extraction, "window [" + std::to_string(start) + ", " +
                                           std::to_string(end_timestep) + "] leaves the series of '" +
                                           id + "' [" + std::to_string(first) + ", " +
                                           std::to_string(last) + "]");
  }
  SequenceWindow window;
  window.chassis_id = id;
  window.gen = table.rows[span.begin].gen;
  window.start_timestep = start;
  const std::size_t offset = span.begin + static_cast<std::size_t>(start - first);
  for (std::size_t i = 0; i < kWindowLength; ++i) {
    const auto& row = table.rows[offset + i];
    window.rows.push_back(row.features);
    if (row.risk_level) window.labels.push_back(*row.risk_level);
  }
  if (window.labels.size() != window.rows.size()) window.labels.clear();
  return window;
}

std::vector<int> eligible_window_ends(const FleetTable& table, const TruckSpan& span,
                                      std::optional<int> failure) {
  const int first = table.rows[span.begin].timestep;
  const int last = table.rows[span.end - 1].timestep;
  int lo = first + static_cast<int>(kWindowLength) - 1;
  int hi = last;
  if (failure) {
    lo = std::max(lo, *failure - kHighHorizon + 1);
    hi = std::min(hi, *failure);
  }
  std::vector<int> ends;
  for (int t = lo; t <= hi; ++t) ends.push_back(t);
  return ends;
}

SequenceWindow extract_test_window(const FleetTable& table, const TruckSpan& span,
                                   std::optional<int> failure, Rng& rng) {
  const auto ends = eligible_window_ends(table, span, failure);
  if (ends.empty()) {
    throw Error(ErrorKind::Extraction, "chassis '" + table.rows[span.begin].chassis_id +
                                           "' has no eligible test window (length " +
                                           std::to_string(span.size()) + ")");
  }
  std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
  return window_ending_at(table, span, ends[pick(rng)]);
}

WindowExtraction extract_training_windows(const FleetTable& labeled,
                                          const TrainingWindowOptions& options,
                                          std::uint64_t seed) {
  if (!labeled.has_labels) {
    throw Error(ErrorKind::Extraction, "training windows require a labeled table");
  }
  WindowExtraction result;
  const auto spans = truck_spans(labeled);
  for (std::size_t truck = 0; truck < spans.size(); ++truck) {
    const auto& span = spans[truck];
    const auto failure = implied_failure(labeled, span);
    const auto ends = eligible_window_ends(labeled, span, failure);
    if (span.size() < kWindowLength || ends.empty()) {
      ++result.skipped_trucks;
      continue;
    }
    auto rng = make_rng(seed, truck);
    if (options.policy == WindowPolicy::MirrorTest) {
      result.windows.push_back(extract_test_window(labeled, span, failure, rng));
      continue;
    }
    if (failure) {
      int first_high = *failure;
      for (std::size_t i = span.begin; i < span.end; ++i) {
        if (labeled.rows[i].risk_level == RiskLabel::High) {
          first_high = labeled.rows[i].timestep;
          break;
        }
      }
      const int lo = std::max(first_high, labeled.rows[span.begin].timestep +
                                              static_cast<int>(kWindowLength) - 1);
      for (int t = lo; t <= labeled.rows[span.end - 1].timestep; ++t) {
        result.windows.push_back(window_ending_at(labeled, span, t));
      }
    } else {
      auto candidates = ends;
      std::shuffle(candidates.begin(), candidates.end(), rng);
      const auto n = std::min(options.healthy_windows_per_truck, candidates.size());
      std::sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n));
      for (std::size_t k = 0; k < n; ++k) {
        result.windows.push_back(window_ending_at(labeled, span, candidates[k]));
      }
    }
  }
  if (result.windows.empty()) {
    throw Error(ErrorKind::Extraction, "no truck is eligible for window extraction");
  }
  return result;
}

FleetTable windows_to_table(const std::vector<SequenceWindow>& windows, std::size_t n_features,
                            bool with_labels) {
  FleetTable table;
  table.n_features = n_features;
  table.has_labels = with_labels;
  for (const auto& window : windows) {
    for (std::size_t i = 0; i < window.length(); ++i) {
      Readout row;
      row.timestep = window.start_timestep + static_cast<int>(i);
      row.chassis_id = window.chassis_id;
      row.gen = window.gen;
      if (with_labels) row.risk_level = window.labels.at(i);
      row.features = window.rows[i];
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace fleetrisk

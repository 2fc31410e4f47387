#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fleetrisk {

// Ordered risk category. The underlying values double as class indices.
enum class RiskLabel : std::uint8_t { Low = 0, Medium = 1, High = 2 };

inline constexpr int kNumRiskClasses = 3;
inline constexpr RiskLabel kAllRiskLabels[] = {RiskLabel::Low, RiskLabel::Medium,
                                               RiskLabel::High};

constexpr int class_index(RiskLabel label) { return static_cast<int>(label); }
constexpr RiskLabel label_from_index(int index) { return static_cast<RiskLabel>(index); }
constexpr RiskLabel max_risk(RiskLabel a, RiskLabel b) { return a < b ? b : a; }

std::string_view to_string(RiskLabel label);
// Exact, case-sensitive inverse of to_string. Throws ErrorKind::Label.
RiskLabel parse_risk_label(std::string_view text);

enum class Generation : std::uint8_t { Gen1 = 1, Gen2 = 2 };

std::string_view to_string(Generation gen);
// Accepts "gen1" / "gen2". Throws ErrorKind::Parse.
Generation parse_generation(std::string_view text);

struct Readout {
  int timestep = 1;
  std::string chassis_id;
  Generation gen = Generation::Gen1;
  std::optional<RiskLabel> risk_level;
  std::vector<double> features;

  friend bool operator==(const Readout&, const Readout&) = default;
};

// Long-format readout table. Rows of one chassis form a contiguous block of
// consecutive timesteps.
struct FleetTable {
  std::size_t n_features = 0;
  // Train tables carry a risk label on every row, test tables on none.
  bool has_labels = false;
  std::vector<Readout> rows;

  friend bool operator==(const FleetTable&, const FleetTable&) = default;
};

inline constexpr std::size_t kNumVariantSpecs = 12;

struct VariantRecord {
  std::string chassis_id;
  std::vector<int> specs;

  friend bool operator==(const VariantRecord&, const VariantRecord&) = default;
};

struct VariantsTable {
  std::vector<VariantRecord> rows;

  friend bool operator==(const VariantsTable&, const VariantsTable&) = default;
};

// chassis id -> failure timestep (nullopt = healthy through end of collection).
using FailureMap = std::map<std::string, std::optional<int>>;

// Half-open row range [begin, end) of one chassis inside a FleetTable.
struct TruckSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

// Groups the rows of a table by chassis in order of first appearance.
// Throws ErrorKind::Invariant when a chassis block is not contiguous.
std::vector<TruckSpan> truck_spans(const FleetTable& table);

// Fixed-length slice of one truck's readouts.
struct SequenceWindow {
  std::string chassis_id;
  Generation gen = Generation::Gen1;
  int start_timestep = 1;
  std::vector<std::vector<double>> rows;
  std::vector<RiskLabel> labels;  // empty when unlabeled, else rows.size()

  std::size_t length() const { return rows.size(); }
  int end_timestep() const { return start_timestep + static_cast<int>(rows.size()) - 1; }
};

inline constexpr std::size_t kWindowLength = 10;

}  // namespace fleetrisk

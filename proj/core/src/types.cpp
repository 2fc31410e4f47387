#include "fleetrisk/types.hpp"

#include <set>

#include "fleetrisk/error.hpp"

namespace fleetrisk {

std::string_view to_string(RiskLabel label) {
  switch (label) {
    case RiskLabel::Low: return "Low";
    case RiskLabel::Medium: return "Medium";
    case RiskLabel::High: return "High";
  }
  return "Low";
}

RiskLabel parse_risk_label(std::string_view text) {
  if (text == "Low") return RiskLabel::Low;
  if (text == "Medium") return RiskLabel::Medium;
  if (text == "High") return RiskLabel::High;
  throw Error(ErrorKind::Label, "unknown risk label '" + std::string(text) + "'");
}

std::string_view to_string(Generation gen) {
  return gen == Generation::Gen1 ? "gen1" : "gen2";
}

Generation parse_generation(std::string_view text) {
  if (text == "gen1") return Generation::Gen1;
  if (text == "gen2") return Generation::Gen2;
  throw Error(ErrorKind::Parse, "unknown generation '" + std::string(text) + "'");
}

std::vector<TruckSpan> truck_spans(const FleetTable& table) {
  std::vector<TruckSpan> spans;
  std::set<std::string_view> seen;
  const auto& rows = table.rows;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i + 1;
    while (j < rows.size() && rows[j].chassis_id == rows[i].chassis_id) ++j;
    if (!seen.insert(rows[i].chassis_id).second) {
      throw Error(ErrorKind::Invariant,
                  "rows of chassis '" + rows[i].chassis_id + "' are not contiguous (row " +
                      std::to_string(i) + ")");
    }
    spans.push_back({i, j});
    i = j;
  }
  return spans;
}

}  // namespace fleetrisk

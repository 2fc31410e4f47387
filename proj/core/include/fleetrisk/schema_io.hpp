#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fleetrisk/types.hpp"

namespace fleetrisk {

// Column names of the challenge files. Feature columns are "af__<k>",
// variant spec columns "Specs__<k>".
inline constexpr std::string_view kTimestepColumn = "Timesteps";
inline constexpr std::string_view kChassisColumn = "ChassisId_encoded";
inline constexpr std::string_view kGenColumn = "gen";
inline constexpr std::string_view kRiskColumn = "risk_level";
inline constexpr std::string_view kPredColumn = "pred";

std::string feature_column_name(std::size_t k);
std::string spec_column_name(std::size_t k);

// Formats a double with the shortest representation that parses back to the
// identical value.
std::string format_double(double value);

// Train tables carry risk_level (expect_labels = true), test tables do not.
// The reader checks the header, every cell, and the table invariants
// (contiguous chassis blocks with consecutive timesteps).
FleetTable read_fleet_table(const std::filesystem::path& path, bool expect_labels);
FleetTable read_fleet_table(std::istream& in, bool expect_labels);

// A labeled table is written with its risk_level column, an unlabeled one without.
void write_fleet_table(const FleetTable& table, const std::filesystem::path& path);
void write_fleet_table(const FleetTable& table, std::ostream& out);

// Throws ErrorKind::Invariant naming the first offending row.
void validate_fleet_table(const FleetTable& table);

VariantsTable read_variants(const std::filesystem::path& path);
VariantsTable read_variants(std::istream& in);
void write_variants(const VariantsTable& table, const std::filesystem::path& path);
void write_variants(const VariantsTable& table, std::ostream& out);

// Single column with header "pred". The reader validates the row count.
void write_prediction_file(const std::vector<RiskLabel>& labels,
                           const std::filesystem::path& path);
void write_prediction_file(const std::vector<RiskLabel>& labels, std::ostream& out);
std::vector<RiskLabel> read_prediction_file(const std::filesystem::path& path,
                                            std::size_t expected_rows);
std::vector<RiskLabel> read_prediction_file(std::istream& in, std::size_t expected_rows);

// Columns "chassis_id,failure_timestep"; a blank timestep marks a healthy truck.
FailureMap read_failures(const std::filesystem::path& path);
void write_failures(const FailureMap& failures, const std::filesystem::path& path);

}  // namespace fleetrisk

#include "fleetrisk/schema_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "fleetrisk/error.hpp"

namespace fleetrisk {
namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

std::string row_context(std::size_t row) { return "data row " + std::to_string(row); }

double parse_double_cell(std::string_view cell, std::size_t row, std::string_view column) {
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Parse, row_context(row) + ", column '" + std::string(column) +
                                      "': not a number: '" + std::string(cell) + "'");
  }
  return value;
}

int parse_int_cell(std::string_view cell, std::size_t row, std::string_view column) {
  int value = 0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Parse, row_context(row) + ", column '" + std::string(column) +
                                      "': not an integer: '" + std::string(cell) + "'");
  }
  return value;
}

void expect_column(const std::vector<std::string_view>& header, std::size_t index,
                   std::string_view name) {
  if (index >= header.size() || header[index] != name) {
    throw Error(ErrorKind::Schema, "missing column '" + std::string(name) + "' at position " +
                                       std::to_string(index));
  }
}

}  // namespace

std::string feature_column_name(std::size_t k) { return "af__" + std::to_string(k); }
std::string spec_column_name(std::size_t k) { return "Specs__" + std::to_string(k); }

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void validate_fleet_table(const FleetTable& table) {
  const bool labeled = table.has_labels;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.features.size() != table.n_features) {
      throw Error(ErrorKind::Invariant, row_context(i) + " has " +
                                            std::to_string(row.features.size()) +
                                            " features, expected " +
                                            std::to_string(table.n_features));
    }
    if (row.risk_level.has_value() != labeled) {
      throw Error(ErrorKind::Invariant,
                  row_context(i) + (labeled ? " lacks a risk label"
                                            : " carries a risk label in an unlabeled table"));
    }
    if (row.timestep < 1) {
      throw Error(ErrorKind::Invariant,
                  row_context(i) + " has non-positive timestep " + std::to_string(row.timestep));
    }
    if (i > 0 && table.rows[i - 1].chassis_id == row.chassis_id &&
        row.timestep != table.rows[i - 1].timestep + 1) {
      throw Error(ErrorKind::Invariant,
                  "chassis '" + row.chassis_id + "' has a timestep gap between " +
                      std::to_string(table.rows[i - 1].timestep) + " and " +
                      std::to_string(row.timestep) + " (" + row_context(i) + ")");
    }
  }
  truck_spans(table);
}

FleetTable read_fleet_table(const std::filesystem::path& path, bool expect_labels) {
  auto in = open_for_read(path);
  return read_fleet_table(in, expect_labels);
}

FleetTable read_fleet_table(std::istream& in, bool expect_labels) {
  std::string line;
  if (!next_line(in, line)) throw Error(ErrorKind::Schema, "missing header row");
  const auto header = split_csv(line);
  expect_column(header, 0, kTimestepColumn);
  expect_column(header, 1, kChassisColumn);
  expect_column(header, 2, kGenColumn);
  std::size_t first_feature = 3;
  if (expect_labels) {
    expect_column(header, 3, kRiskColumn);
    first_feature = 4;
  } else if (header.size() > 3 && header[3] == kRiskColumn) {
    throw Error(ErrorKind::Schema, "unexpected column 'risk_level' in unlabeled table");
  }
  FleetTable table;
  table.has_labels = expect_labels;
  table.n_features = header.size() - first_feature;
  for (std::size_t k = 0; k < table.n_features; ++k) {
    const auto expected = feature_column_name(k);
    if (header[first_feature + k] != expected) {
      throw Error(ErrorKind::Schema, "unexpected column '" +
                                         std::string(header[first_feature + k]) +
                                         "', expected '" + expected + "'");
    }
  }

  std::size_t row_index = 0;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::Parse, row_context(row_index) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(header.size()));
    }
    Readout row;
    row.timestep = parse_int_cell(cells[0], row_index, kTimestepColumn);
    row.chassis_id = std::string(cells[1]);
    if (row.chassis_id.empty()) {
      throw Error(ErrorKind::Parse, row_context(row_index) + ": empty chassis id");
    }
    try {
      row.gen = parse_generation(cells[2]);
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, row_context(row_index) + ": " + e.what());
    }
    if (expect_labels) {
      try {
        row.risk_level = parse_risk_label(cells[3]);
      } catch (const Error&) {
        throw Error(ErrorKind::Label, row_context(row_index) + ": unknown risk label '" +
                                          std::string(cells[3]) + "'");
      }
    }
    row.features.resize(table.n_features);
    for (std::size_t k = 0; k < table.n_features; ++k) {
      row.features[k] = parse_double_cell(cells[first_feature + k], row_index,
                                          header[first_feature + k]);
    }
    table.rows.push_back(std::move(row));
    ++row_index;
  }
  validate_fleet_table(table);
  return table;
}

void write_fleet_table(const FleetTable& table, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_fleet_table(table, out);
  finish_write(out, path);
}

void write_fleet_table(const FleetTable& table, std::ostream& out) {
  const bool labeled = table.has_labels;
  out << kTimestepColumn << ',' << kChassisColumn << ',' << kGenColumn;
  if (labeled) out << ',' << kRiskColumn;
  for (std::size_t k = 0; k < table.n_features; ++k) out << ',' << feature_column_name(k);
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.timestep << ',' << row.chassis_id << ',' << to_string(row.gen);
    if (labeled) out << ',' << to_string(*row.risk_level);
    for (double v : row.features) out << ',' << format_double(v);
    out << '\n';
  }
}

VariantsTable read_variants(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return read_variants(in);
}

VariantsTable read_variants(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw Error(ErrorKind::Schema, "missing header row");
  const auto header = split_csv(line);
  if (header.size() != kNumVariantSpecs + 1) {
    throw Error(ErrorKind::Schema, "variants table has " + std::to_string(header.size()) +
                                       " columns, expected " +
                                       std::to_string(kNumVariantSpecs + 1));
  }
  expect_column(header, 0, kChassisColumn);
  for (std::size_t k = 0; k < kNumVariantSpecs; ++k) expect_column(header, k + 1, spec_column_name(k));

  VariantsTable table;
  std::set<std::string> seen;
  std::size_t row_index = 0;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::Schema, row_context(row_index) + " has " +
                                         std::to_string(cells.size()) + " columns, expected " +
                                         std::to_string(header.size()));
    }
    VariantRecord record;
    record.chassis_id = std::string(cells[0]);
    if (!seen.insert(record.chassis_id).second) {
      throw Error(ErrorKind::Uniqueness, "duplicate chassis id '" + record.chassis_id + "' at " +
                                             row_context(row_index));
    }
    for (std::size_t k = 0; k < kNumVariantSpecs; ++k) {
      record.specs.push_back(parse_int_cell(cells[k + 1], row_index, header[k + 1]));
    }
    table.rows.push_back(std::move(record));
    ++row_index;
  }
  return table;
}

void write_variants(const VariantsTable& table, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_variants(table, out);
  finish_write(out, path);
}

void write_variants(const VariantsTable& table, std::ostream& out) {
  std::set<std::string_view> seen;
  for (const auto& record : table.rows) {
    if (record.specs.size() != kNumVariantSpecs) {
      throw Error(ErrorKind::Schema, "chassis '" + record.chassis_id + "' has " +
                                         std::to_string(record.specs.size()) +
                                         " specs, expected " + std::to_string(kNumVariantSpecs));
    }
    if (!seen.insert(record.chassis_id).second) {
      throw Error(ErrorKind::Uniqueness, "duplicate chassis id '" + record.chassis_id + "'");
    }
  }
  out << kChassisColumn;
  for (std::size_t k = 0; k < kNumVariantSpecs; ++k) out << ',' << spec_column_name(k);
  out << '\n';
  for (const auto& record : table.rows) {
    out << record.chassis_id;
    for (int s : record.specs) out << ',' << s;
    out << '\n';
  }
}

void write_prediction_file(const std::vector<RiskLabel>& labels,
                           const std::filesystem::path& path) {
  if (labels.empty()) throw Error(ErrorKind::Count, "refusing to write an empty prediction file");
  auto out = open_for_write(path);
  write_prediction_file(labels, out);
  finish_write(out, path);
}

void write_prediction_file(const std::vector<RiskLabel>& labels, std::ostream& out) {
  if (labels.empty()) throw Error(ErrorKind::Count, "refusing to write an empty prediction file");
  out << kPredColumn << '\n';
  for (auto label : labels) out << to_string(label) << '\n';
}

std::vector<RiskLabel> read_prediction_file(const std::filesystem::path& path,
                                            std::size_t expected_rows) {
  auto in = open_for_read(path);
  return read_prediction_file(in, expected_rows);
}

std::vector<RiskLabel> read_prediction_file(std::istream& in, std::size_t expected_rows) {
  std::string line;
  if (!next_line(in, line) || line != kPredColumn) {
    throw Error(ErrorKind::Schema, "prediction file must start with header 'pred'");
  }
  std::vector<RiskLabel> labels;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    try {
      labels.push_back(parse_risk_label(line));
    } catch (const Error&) {
      throw Error(ErrorKind::Label, row_context(labels.size()) + ": invalid label '" + line + "'");
    }
  }
  if (labels.size() != expected_rows) {
    throw Error(ErrorKind::Count, "expected " + std::to_string(expected_rows) +
                                      " prediction rows, found " + std::to_string(labels.size()));
  }
  return labels;
}

FailureMap read_failures(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string line;
  if (!next_line(in, line) || line != "chassis_id,failure_timestep") {
    throw Error(ErrorKind::Schema, "failures file must start with 'chassis_id,failure_timestep'");
  }
  FailureMap failures;
  std::size_t row_index = 0;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) {
      throw Error(ErrorKind::Parse, row_context(row_index) + " must have 2 cells");
    }
    std::optional<int> failure;
    if (!cells[1].empty()) failure = parse_int_cell(cells[1], row_index, "failure_timestep");
    if (!failures.emplace(std::string(cells[0]), failure).second) {
      throw Error(ErrorKind::Uniqueness, "duplicate chassis id '" + std::string(cells[0]) + "'");
    }
    ++row_index;
  }
  return failures;
}

void write_failures(const FailureMap& failures, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "chassis_id,failure_timestep\n";
  for (const auto& [id, failure] : failures) {
    out << id << ',';
    if (failure) out << *failure;
    out << '\n';
  }
  finish_write(out, path);
}

}  // namespace fleetrisk

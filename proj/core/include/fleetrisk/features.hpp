#pragma once

#include <span>
#include <vector>

#include "fleetrisk/types.hpp"
#include "fleetrisk/wavelet.hpp"

namespace fleetrisk {

struct FeatureOptions {
  bool include_raw = true;
  bool include_derivative = true;
  bool include_wavelet = true;
  int wavelet_levels = 1;
  // Quantile subtracted per feature column and per split.
  double quantile_q = 0.005;
  // Append the truck's encoded variant specs to the flat vector.
  bool include_variants = false;
};

// Throws ErrorKind::Config when the options are unusable for windows of
// length `window_length`.
void validate(const FeatureOptions& options, std::size_t window_length = kWindowLength);

// Same-length first difference with a leading zero. Throws ErrorKind::Domain
// on an empty series.
std::vector<double> first_derivative(std::span<const double> series);

// Lower order statistic: sorted[floor(q * (n - 1))].
double lower_quantile(std::vector<double> values, double q);

enum class SplitKey { Train, TestGen1, TestGen2 };

// Subtracts each column's empirical q-quantile, computed within this split.
// Test splits must contain only rows of the matching generation
// (ErrorKind::Domain otherwise, and for an empty table).
FleetTable quantile_shift_normalize(const FleetTable& table, double q, SplitKey split);

// Normalizes a test table as two splits (gen1 rows, gen2 rows) and returns
// the rows in their original order.
FleetTable normalize_test_table(const FleetTable& test, double q);

struct FeatureMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> rows;  // row-major n_rows x n_cols
  std::vector<double> flat;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(rows).subspan(i * n_cols, n_cols);
  }
};

// Per-timestep matrix: for every row the raw features, then their first
// derivatives (whichever are enabled). The flat vector is the row-major
// matrix followed, for each feature, by the wavelet coefficients of its raw
// series (details from finest to coarsest level, then the approximation),
// then the variant specs when enabled.
FeatureMatrix build_feature_matrix(const SequenceWindow& window, const FeatureOptions& options,
                                   std::span<const int> variant_specs = {});

// Length of the flat vector for a window of `length` rows and F features.
std::size_t flat_feature_length(std::size_t length, std::size_t n_features,
                                const FeatureOptions& options, std::size_t n_specs = 0);

}  // namespace fleetrisk

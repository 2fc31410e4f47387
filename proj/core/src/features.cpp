#include "fleetrisk/features.hpp"

#include <algorithm>
#include <cmath>

#include "fleetrisk/error.hpp"

namespace fleetrisk {

void validate(const FeatureOptions& options, std::size_t window_length) {
  if (!(options.quantile_q > 0.0 && options.quantile_q < 0.5)) {
    throw Error(ErrorKind::Config, "quantile_q must lie in (0, 0.5)");
  }
  if (!options.include_raw && !options.include_derivative) {
    throw Error(ErrorKind::Config, "at least one per-timestep channel must be enabled");
  }
  if (options.include_wavelet &&
      (options.wavelet_levels < 1 || options.wavelet_levels > dwt_max_level(window_length))) {
    throw Error(ErrorKind::Config, "wavelet_levels " + std::to_string(options.wavelet_levels) +
                                       " is incompatible with window length " +
                                       std::to_string(window_length));
  }
}

std::vector<double> first_derivative(std::span<const double> series) {
  if (series.empty()) throw Error(ErrorKind::Domain, "derivative of an empty series");
  std::vector<double> out(series.size(), 0.0);
  for (std::size_t i = 1; i < series.size(); ++i) out[i] = series[i] - series[i - 1];
  return out;
}

double lower_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::Domain, "quantile of an empty column");
  const auto index = static_cast<std::size_t>(std::floor(q * double(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(index),
                   values.end());
  return values[index];
}

FleetTable quantile_shift_normalize(const FleetTable& table, double q, SplitKey split) {
  if (table.rows.empty()) throw Error(ErrorKind::Domain, "cannot normalize an empty split");
  if (split != SplitKey::Train) {
    const auto want = split == SplitKey::TestGen1 ? Generation::Gen1 : Generation::Gen2;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (table.rows[i].gen != want) {
        throw Error(ErrorKind::Domain, "row " + std::to_string(i) + " is " +
                                           std::string(to_string(table.rows[i].gen)) +
                                           " but the split holds " +
                                           std::string(to_string(want)) + " rows only");
      }
    }
  }
  FleetTable out = table;
  std::vector<double> column(table.rows.size());
  for (std::size_t k = 0; k < table.n_features; ++k) {
    for (std::size_t i = 0; i < table.rows.size(); ++i) column[i] = table.rows[i].features[k];
    const double shift = lower_quantile(column, q);
    for (auto& row : out.rows) row.features[k] -= shift;
  }
  return out;
}

FleetTable normalize_test_table(const FleetTable& test, double q) {
  FleetTable out = test;
  for (auto gen : {Generation::Gen1, Generation::Gen2}) {
    FleetTable part;
    part.n_features = test.n_features;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < test.rows.size(); ++i) {
      if (test.rows[i].gen == gen) {
        part.rows.push_back(test.rows[i]);
        index.push_back(i);
      }
    }
    if (part.rows.empty()) continue;
    const auto normalized = quantile_shift_normalize(
        part, q, gen == Generation::Gen1 ? SplitKey::TestGen1 : SplitKey::TestGen2);
    for (std::size_t j = 0; j < index.size(); ++j) {
      out.rows[index[j]].features = normalized.rows[j].features;
    }
  }
  return out;
}

std::size_t flat_feature_length(std::size_t length, std::size_t n_features,
                                const FeatureOptions& options, std::size_t n_specs) {
  std::size_t channels = 0;
  if (options.include_raw) channels += n_features;
  if (options.include_derivative) channels += n_features;
  std::size_t total = length * channels;
  if (options.include_wavelet) {
    std::size_t n = length;
    std::size_t per_feature = 0;
    for (int level = 0; level < options.wavelet_levels; ++level) {
      n = dwt_coeff_count(n);
      per_feature += n;
    }
    per_feature += n;
    total += per_feature * n_features;
  }
  if (options.include_variants) total += n_specs;
  return total;
}

FeatureMatrix build_feature_matrix(const SequenceWindow& window, const FeatureOptions& options,
                                   std::span<const int> variant_specs) {
  const std::size_t length = window.length();
  if (length == 0) throw Error(ErrorKind::Domain, "empty window");
  if (options.include_derivative && length < 2) {
    throw Error(ErrorKind::Domain, "derivatives need a window of at least 2 rows");
  }
  const std::size_t n_features = window.rows.front().size();
  if (options.include_wavelet &&
      (options.wavelet_levels < 1 || options.wavelet_levels > dwt_max_level(length))) {
    throw Error(ErrorKind::Domain, "wavelet level " + std::to_string(options.wavelet_levels) +
                                       " is incompatible with window length " +
                                       std::to_string(length));
  }

  // Column-major copy of the raw series, one vector per feature.
  std::vector<std::vector<double>> series(n_features, std::vector<double>(length));
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t k = 0; k < n_features; ++k) series[k][t] = window.rows[t][k];
  }
  std::vector<std::vector<double>> derivative;
  if (options.include_derivative) {
    for (const auto& s : series) derivative.push_back(first_derivative(s));
  }

  FeatureMatrix m;
  m.n_rows = length;
  m.n_cols = (options.include_raw ? n_features : 0) +
             (options.include_derivative ? n_features : 0);
  m.rows.reserve(m.n_rows * m.n_cols);
  for (std::size_t t = 0; t < length; ++t) {
    if (options.include_raw) {
      m.rows.insert(m.rows.end(), window.rows[t].begin(), window.rows[t].end());
    }
    if (options.include_derivative) {
      for (std::size_t k = 0; k < n_features; ++k) m.rows.push_back(derivative[k][t]);
    }
  }

  m.flat = m.rows;
  if (options.include_wavelet) {
    for (const auto& s : series) {
      const auto coeffs = dwt_db4(s, options.wavelet_levels);
      for (const auto& detail : coeffs.details) {
        m.flat.insert(m.flat.end(), detail.begin(), detail.end());
      }
      m.flat.insert(m.flat.end(), coeffs.approx.begin(), coeffs.approx.end());
    }
  }
  if (options.include_variants) {
    for (int spec : variant_specs) m.flat.push_back(double(spec));
  }
  return m;
}

}  // namespace fleetrisk

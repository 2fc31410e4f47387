#include "fleetrisk/wavelet.hpp"

#include <bit>

#include "fleetrisk/error.hpp"

namespace fleetrisk {
namespace {

constexpr std::size_t kTaps = kDb4Lowpass.size();

// Half-sample symmetric extension, repeated as often as needed:
// ... x1 x0 | x0 x1 ... x(n-1) | x(n-1) x(n-2) ...
double symmetric_at(std::span<const double> x, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto period = 2 * n;
  auto m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - 1 - m;
  return x[static_cast<std::size_t>(m)];
}

// One analysis step: out[o] = sum_j filter[j] * x_ext[2o + 1 - j].
void analyze(std::span<const double> x, const std::array<double, kTaps>& lo,
             const std::array<double, kTaps>& hi, std::vector<double>& approx,
             std::vector<double>& detail) {
  const auto count = dwt_coeff_count(x.size());
  approx.assign(count, 0.0);
  detail.assign(count, 0.0);
  for (std::size_t o = 0; o < count; ++o) {
    const auto center = static_cast<std::ptrdiff_t>(2 * o + 1);
    double a = 0.0;
    double d = 0.0;
    for (std::size_t j = 0; j < kTaps; ++j) {
      const double v = symmetric_at(x, center - static_cast<std::ptrdiff_t>(j));
      a += lo[j] * v;
      d += hi[j] * v;
    }
    approx[o] = a;
    detail[o] = d;
  }
}

// Adjoint of `analyze`, evaluated on the first n samples only.
std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               const std::array<double, kTaps>& lo,
                               const std::array<double, kTaps>& hi, std::size_t n) {
  std::vector<double> x(n, 0.0);
  for (std::size_t o = 0; o < approx.size(); ++o) {
    const auto center = static_cast<std::ptrdiff_t>(2 * o + 1);
    for (std::size_t j = 0; j < kTaps; ++j) {
      const auto k = center - static_cast<std::ptrdiff_t>(j);
      if (k < 0 || k >= static_cast<std::ptrdiff_t>(n)) continue;
      x[static_cast<std::size_t>(k)] += lo[j] * approx[o] + hi[j] * detail[o];
    }
  }
  return x;
}

}  // namespace

std::array<double, 8> db4_highpass() {
  std::array<double, kTaps> hi{};
  for (std::size_t j = 0; j < kTaps; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    hi[j] = sign * kDb4Lowpass[kTaps - 1 - j];
  }
  return hi;
}

std::size_t dwt_coeff_count(std::size_t n) { return (n + kTaps - 1) / 2; }

int dwt_max_level(std::size_t n) {
  if (n == 0) return 0;
  return static_cast<int>(std::bit_width(n)) - 1;
}

WaveletCoeffs dwt_db4(std::span<const double> series, int levels) {
  if (series.empty()) throw Error(ErrorKind::Domain, "wavelet transform of an empty series");
  if (levels < 1 || levels > dwt_max_level(series.size())) {
    throw Error(ErrorKind::Domain, "wavelet level " + std::to_string(levels) +
                                       " is outside [1, " +
                                       std::to_string(dwt_max_level(series.size())) +
                                       "] for length " + std::to_string(series.size()));
  }
  const auto hi = db4_highpass();
  WaveletCoeffs coeffs;
  std::vector<double> current(series.begin(), series.end());
  for (int level = 0; level < levels; ++level) {
    coeffs.input_lengths.push_back(current.size());
    std::vector<double> approx;
    std::vector<double> detail;
    analyze(current, kDb4Lowpass, hi, approx, detail);
    coeffs.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  coeffs.approx = std::move(current);
  return coeffs;
}

std::vector<double> idwt_db4(const WaveletCoeffs& coeffs) {
  const auto hi = db4_highpass();
  std::vector<double> current = coeffs.approx;
  for (std::size_t level = coeffs.details.size(); level-- > 0;) {
    current = synthesize(current, coeffs.details[level], kDb4Lowpass, hi,
                         coeffs.input_lengths[level]);
  }
  return current;
}

}  // namespace fleetrisk

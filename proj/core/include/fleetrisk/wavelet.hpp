#pragma once

#include <array>
#include <span>
#include <vector>

namespace fleetrisk {

// Orthonormal Daubechies wavelet with 4 vanishing moments (8 taps),
// decomposition low-pass filter in convolution order.
inline constexpr std::array<double, 8> kDb4Lowpass = {
    -0.010597401784997278, 0.032883011666982945, 0.030841381835986965, -0.18703481171888114,
    -0.02798376941698385,  0.6308807679295904,   0.7148465705525415,   0.23037781330885523,
};

// Quadrature mirror of kDb4Lowpass: hi[j] = (-1)^j lo[7 - j].
std::array<double, 8> db4_highpass();

// Multilevel decomposition. details[0] is the finest level; `approx` is the
// coarsest approximation; input_lengths[l] is the signal length entering
// level l (needed to undo the padding on reconstruction).
struct WaveletCoeffs {
  std::vector<double> approx;
  std::vector<std::vector<double>> details;
  std::vector<std::size_t> input_lengths;
};

// Coefficients produced by one level on a length-n input with half-sample
// symmetric padding: floor((n + 7) / 2).
std::size_t dwt_coeff_count(std::size_t n);

// Deepest level allowed for a length-n signal: floor(log2(n)).
int dwt_max_level(std::size_t n);

// Throws ErrorKind::Domain for an empty series or levels outside
// [1, dwt_max_level(n)].
WaveletCoeffs dwt_db4(std::span<const double> series, int levels);

std::vector<double> idwt_db4(const WaveletCoeffs& coeffs);

}  // namespace fleetrisk

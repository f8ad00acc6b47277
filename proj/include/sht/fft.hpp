#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace sht::fft {

using cdouble = std::complex<double>;

/// In-place unnormalized discrete Fourier transform,
///   X_k = sum_j x_j * exp(sign * 2*pi*i * j*k / n).
/// Smooth lengths (all prime factors <= 13) go through a mixed-radix
/// Cooley-Tukey path; everything else through a Bluestein chirp-z
/// convolution, so any length runs in O(n log n)-class time.
void transform(std::span<cdouble> data, int sign);

inline void forward(std::span<cdouble> data) { transform(data, -1); }
inline void inverse(std::span<cdouble> data) { transform(data, +1); }

/// True when every prime factor of n is <= 13.
bool smooth_length(std::size_t n);

}  // namespace sht::fft

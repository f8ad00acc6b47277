#pragma once

#include <span>
#include <vector>

#include "sht/alm.hpp"
#include "sht/grid.hpp"

namespace sht {

/// Fourier coefficients Delta_m(r) of one ring, m = 0..mmax.
struct RingSpectrum {
    int ring_index = 0;
    std::vector<cdouble> m_values;
};

/// Pixel samples of one ring from its spectrum:
///   s(phi_j) = sum_{m=-mmax}^{mmax} Delta_m * exp(i*m*phi_j),
/// with Delta_{-m} = conj(Delta_m). Each order folds onto Fourier bin
/// (m mod n_phi) carrying the first-sample phase exp(i*m*phi_0); orders
/// beyond n_phi/2 alias by accumulation, never truncation.
void ring_synthesis_into(std::span<const cdouble> delta, const RingDescriptor& ring,
                         std::span<double> out);
std::vector<double> ring_synthesis(const RingSpectrum& spectrum, const RingDescriptor& ring);

/// Weighted ring DFT, Delta_m = w * sum_j s(phi_j) * exp(-i*m*phi_j) for
/// m = 0..mmax; orders past n_phi/2 read the aliased bin.
void ring_analysis_into(std::span<const double> samples, const RingDescriptor& ring,
                        int mmax, std::span<cdouble> out);
RingSpectrum ring_analysis(std::span<const double> samples, const RingDescriptor& ring,
                           int mmax);

}  // namespace sht

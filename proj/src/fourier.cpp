#include "sht/fourier.hpp"

#include <cmath>
#include <stdexcept>

#include "sht/fft.hpp"

namespace sht {

void ring_synthesis_into(std::span<const cdouble> delta, const RingDescriptor& ring,
                         std::span<double> out) {
    const int n = ring.n_phi;
    if (n <= 0) throw std::invalid_argument("ring_synthesis: ring has no samples");
    if (out.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("ring_synthesis: output length != n_phi");

    std::vector<cdouble> bins(n, cdouble{0.0, 0.0});
    for (std::size_t m = 0; m < delta.size(); ++m) {
        cdouble v = delta[m];
        if (ring.phi_0 != 0.0 && m > 0)
            v *= std::polar(1.0, static_cast<double>(m) * ring.phi_0);
        const std::size_t b = m % n;
        bins[b] += v;
        if (m >= 1) bins[(n - b) % n] += std::conj(v);
    }
    fft::inverse(bins);
    for (int j = 0; j < n; ++j) out[j] = bins[j].real();
}

std::vector<double> ring_synthesis(const RingSpectrum& spectrum, const RingDescriptor& ring) {
    std::vector<double> out(ring.n_phi > 0 ? ring.n_phi : 0);
    ring_synthesis_into(spectrum.m_values, ring, out);
    return out;
}

void ring_analysis_into(std::span<const double> samples, const RingDescriptor& ring,
                        int mmax, std::span<cdouble> out) {
    if (mmax < 0) throw std::invalid_argument("ring_analysis: mmax must be >= 0");
    const int n = ring.n_phi;
    if (n <= 0) throw std::invalid_argument("ring_analysis: ring has no samples");
    if (samples.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("ring_analysis: sample length != n_phi");
    if (out.size() != static_cast<std::size_t>(mmax) + 1)
        throw std::invalid_argument("ring_analysis: output length != mmax+1");

    std::vector<cdouble> bins(n);
    for (int j = 0; j < n; ++j) bins[j] = cdouble{samples[j], 0.0};
    fft::forward(bins);
    const double w = ring.weight;
    for (int m = 0; m <= mmax; ++m) {
        cdouble v = bins[m % n] * w;
        if (ring.phi_0 != 0.0 && m > 0)
            v *= std::polar(1.0, -static_cast<double>(m) * ring.phi_0);
        out[m] = v;
    }
}

RingSpectrum ring_analysis(std::span<const double> samples, const RingDescriptor& ring,
                           int mmax) {
    RingSpectrum spec;
    spec.ring_index = ring.index;
    spec.m_values.resize(static_cast<std::size_t>(mmax) + 1);
    ring_analysis_into(samples, ring, mmax, spec.m_values);
    return spec;
}

}  // namespace sht

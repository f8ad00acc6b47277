#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "sht/grid.hpp"

namespace sht {

using cdouble = std::complex<double>;

/// Harmonic coefficients a_{lm} for 0 <= m <= mmax, m <= l <= lmax, stored
/// m-major: all degrees of m=0 first, then m=1, and so on. Real fields keep
/// only m >= 0; the negative orders follow from conjugation.
struct AlmSet {
    int lmax = 0;
    int mmax = 0;
    std::vector<cdouble> values;

    AlmSet() = default;
    AlmSet(int lmax_, int mmax_);

    static std::size_t count(int lmax, int mmax);

    /// Index of the first coefficient of order m.
    std::size_t offset(int m) const {
        auto mm = static_cast<std::size_t>(m);
        return mm * (lmax + 1) - mm * (mm - 1) / 2;
    }
    std::size_t index(int l, int m) const { return offset(m) + (l - m); }

    cdouble& at(int l, int m) { return values[index(l, m)]; }
    const cdouble& at(int l, int m) const { return values[index(l, m)]; }
};

/// Real-valued pixels over an iso-latitude grid, ring-ordered north to
/// south, each ring in increasing phi from phi_0.
struct SkyMap {
    PixelGrid grid;
    std::vector<double> pixels;
};

enum class DeltaKind { synthesis, analysis };  // Delta^A vs Delta^S

/// Intermediate panel Delta_m(r): the per-ring per-order sums linking the
/// Legendre stage to the Fourier stage, and the only object redistributed
/// between workers. Entries are stored row-major by ring.
struct DeltaPanel {
    DeltaKind kind = DeltaKind::synthesis;
    std::vector<int> rings;  // ascending global ring indices
    std::vector<int> ms;     // ascending orders
    std::vector<cdouble> entries;

    std::size_t n_rings() const { return rings.size(); }
    std::size_t n_ms() const { return ms.size(); }

    cdouble& at(std::size_t ring_pos, std::size_t m_pos) {
        return entries[ring_pos * ms.size() + m_pos];
    }
    const cdouble& at(std::size_t ring_pos, std::size_t m_pos) const {
        return entries[ring_pos * ms.size() + m_pos];
    }
};

}  // namespace sht

#include "sht/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sht {

namespace {

constexpr double pi = std::numbers::pi;

double safe_sin_theta(double z) { return std::sqrt((1.0 - z) * (1.0 + z)); }

}  // namespace

std::vector<double> PixelGrid::cos_thetas() const {
    std::vector<double> z(rings.size());
    for (std::size_t k = 0; k < rings.size(); ++k) z[k] = rings[k].cos_theta;
    return z;
}

PixelGrid build_healpix_grid(int nside) {
    if (nside < 1) throw std::invalid_argument("healpix grid: nside must be >= 1");

    const int n_rings = 4 * nside - 1;
    PixelGrid grid;
    grid.scheme = GridScheme::healpix_ring;
    grid.nside = nside;
    grid.n_pix = 12LL * nside * nside;
    grid.rings.resize(n_rings);

    const double weight = 4.0 * pi / static_cast<double>(grid.n_pix);

    // Northern hemisphere incl. equator; ring numbers i run 1..2*nside here.
    for (int i = 1; i <= 2 * nside; ++i) {
        RingDescriptor r;
        if (i < nside) {  // polar cap
            r.n_phi = 4 * i;
            r.cos_theta = 1.0 - static_cast<double>(i) * i / (3.0 * nside * nside);
            r.phi_0 = pi / (4.0 * i);
        } else {  // equatorial belt; phi_0 alternates ring by ring
            r.n_phi = 4 * nside;
            r.cos_theta = 4.0 / 3.0 - 2.0 * i / (3.0 * nside);
            r.phi_0 = ((i - nside) % 2 == 0) ? pi / (4.0 * nside) : 0.0;
        }
        r.sin_theta = safe_sin_theta(r.cos_theta);
        r.weight = weight;
        grid.rings[i - 1] = r;
    }
    // Southern rings mirror the north so the symmetry is exact by
    // construction (same n_phi and phi_0, negated cos_theta).
    for (int i = 2 * nside + 1; i <= n_rings; ++i) {
        RingDescriptor r = grid.rings[(4 * nside - i) - 1];
        r.cos_theta = -r.cos_theta;
        grid.rings[i - 1] = r;
    }

    std::int64_t offset = 0;
    for (int k = 0; k < n_rings; ++k) {
        grid.rings[k].index = k;
        grid.rings[k].pixel_offset = offset;
        offset += grid.rings[k].n_phi;
    }
    if (offset != grid.n_pix) throw std::runtime_error("healpix grid: pixel count mismatch");
    return grid;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_nodes(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_nodes: n must be >= 1");

    std::vector<double> x(n), w(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess for the i-th largest root of P_n.
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n(t) and P'_n(t) by the three-term recurrence.
            double p0 = 1.0, p1 = t;
            for (int l = 2; l <= n; ++l) {
                double p2 = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (p0 - t * p1) / (1.0 - t * t);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                converged = true;
                break;
            }
        }
        if (!converged) throw std::runtime_error("gauss_legendre_nodes: Newton iteration failed");
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        // Mirror root; keeps the rule exactly symmetric.
        x[n - 1 - i] = -t;
        w[n - 1 - i] = w[i];
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    return {x, w};
}

PixelGrid build_gauss_legendre_grid(int n_rings, int n_phi) {
    if (n_rings < 1) throw std::invalid_argument("gauss-legendre grid: n_rings must be >= 1");
    if (n_phi < 1) throw std::invalid_argument("gauss-legendre grid: n_phi must be >= 1");

    auto [x, glw] = gauss_legendre_nodes(n_rings);

    PixelGrid grid;
    grid.scheme = GridScheme::gauss_legendre;
    grid.nside = 0;
    grid.n_pix = static_cast<std::int64_t>(n_rings) * n_phi;
    grid.rings.resize(n_rings);

    std::int64_t offset = 0;
    for (int k = 0; k < n_rings; ++k) {
        RingDescriptor& r = grid.rings[k];
        r.index = k;
        r.cos_theta = x[k];
        r.sin_theta = safe_sin_theta(x[k]);
        r.n_phi = n_phi;
        r.phi_0 = 0.0;
        r.weight = 2.0 * pi / n_phi * glw[k];
        r.pixel_offset = offset;
        offset += n_phi;
    }
    return grid;
}

std::vector<std::pair<int, std::optional<int>>>
symmetric_ring_pairs(const PixelGrid& grid) {
    const int n = grid.n_rings();
    std::vector<std::pair<int, std::optional<int>>> pairs;
    pairs.reserve((n + 1) / 2);
    for (int k = 0; k < n / 2; ++k) {
        const RingDescriptor& a = grid.rings[k];
        const RingDescriptor& b = grid.rings[n - 1 - k];
        if (a.n_phi != b.n_phi || std::abs(a.cos_theta + b.cos_theta) > 1e-14)
            throw std::invalid_argument("symmetric_ring_pairs: grid is not mirror symmetric");
        pairs.emplace_back(k, n - 1 - k);
    }
    if (n % 2 == 1) {
        if (std::abs(grid.rings[n / 2].cos_theta) > 1e-14)
            throw std::invalid_argument("symmetric_ring_pairs: central ring is off the equator");
        pairs.emplace_back(n / 2, std::nullopt);
    }
    return pairs;
}

std::string to_string(GridScheme scheme) {
    return scheme == GridScheme::healpix_ring ? "healpix-ring" : "gauss-legendre";
}

}  // namespace sht

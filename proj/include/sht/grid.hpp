#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sht {

/// One iso-latitude ring of samples, ordered north to south within a grid.
/// Samples on the ring sit at phi_j = phi_0 + j * (2*pi / n_phi).
struct RingDescriptor {
    int index = 0;           // 0-based ring number, north to south
    double cos_theta = 0.0;  // cosine of colatitude, in [-1, 1]
    double sin_theta = 0.0;  // sqrt(1 - cos_theta^2), >= 0
    int n_phi = 0;           // samples on this ring
    double phi_0 = 0.0;      // azimuth of the first sample, radians
    double weight = 0.0;     // per-sample quadrature weight, steradians
    std::int64_t pixel_offset = 0;  // global index of the ring's first pixel
};

enum class GridScheme { healpix_ring, gauss_legendre };

/// Iso-latitude pixelization: an ordered list of rings symmetric about the
/// equator. Immutable after construction; safe to share across threads.
struct PixelGrid {
    GridScheme scheme = GridScheme::healpix_ring;
    std::int64_t n_pix = 0;
    int nside = 0;  // resolution parameter, HEALPix only
    std::vector<RingDescriptor> rings;

    int n_rings() const { return static_cast<int>(rings.size()); }

    /// Ring cos_theta values in grid order (north to south).
    std::vector<double> cos_thetas() const;
};

/// HEALPix ring-scheme grid: 4*nside-1 rings, 12*nside^2 pixels, uniform
/// per-sample weight 4*pi/n_pix. Polar-cap ring i (1 <= i < nside) carries
/// 4*i samples at z = 1 - i^2/(3*nside^2) with phi_0 = pi/(4*i); the
/// equatorial belt (nside <= i <= 3*nside) carries 4*nside samples at
/// z = 4/3 - 2*i/(3*nside) with phi_0 alternating pi/(4*nside) and 0.
/// The southern hemisphere mirrors the northern one.
PixelGrid build_healpix_grid(int nside);

/// Gauss-Legendre grid: ring latitudes are the roots of P_{n_rings}, every
/// ring has n_phi equidistant samples starting at phi_0 = 0, and the
/// per-sample weight is (2*pi/n_phi) times the Gauss-Legendre node weight.
/// Quadrature is exact for band-limited fields, which makes this the
/// reference grid for round-trip identities.
PixelGrid build_gauss_legendre_grid(int n_rings, int n_phi);

/// Nodes (descending) and weights of the n-point Gauss-Legendre rule on
/// [-1, 1], computed by Newton iteration on P_n.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_nodes(int n);

/// Pair each northern ring with its mirror; an odd central ring pairs with
/// itself (south == nullopt). Throws std::invalid_argument if the grid is
/// not symmetric about the equator.
std::vector<std::pair<int, std::optional<int>>>
symmetric_ring_pairs(const PixelGrid& grid);

std::string to_string(GridScheme scheme);

}  // namespace sht

#include "sht/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace sht {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double uniform_pm1(std::uint64_t seed, std::uint64_t index) {
    // 53 bits plus a half-step offset: u in (0,1), so 2u-1 stays in (-1,1).
    const double u = (static_cast<double>(splitmix64_at(seed, index) >> 11) + 0.5) * 0x1p-53;
    return 2.0 * u - 1.0;
}

AlmSet random_alm(int lmax, int mmax, std::uint64_t seed) {
    AlmSet alm(lmax, mmax);
    for (std::size_t k = 0; k < alm.values.size(); ++k) {
        const double re = uniform_pm1(seed, 2 * k);
        const double im = uniform_pm1(seed, 2 * k + 1);
        alm.values[k] = {re, im};
    }
    for (int l = 0; l <= lmax; ++l) alm.at(l, 0).imag(0.0);
    return alm;
}

double roundtrip_error(const AlmSet& a_init, const AlmSet& a_out) {
    if (a_init.lmax != a_out.lmax || a_init.mmax != a_out.mmax)
        throw std::invalid_argument("roundtrip_error: mismatched band limits");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a_init.values.size(); ++i) {
        num += std::norm(a_init.values[i] - a_out.values[i]);
        den += std::norm(a_init.values[i]);
    }
    if (den == 0.0) throw std::domain_error("roundtrip_error: zero reference norm");
    return std::sqrt(num / den);
}

std::vector<std::uint8_t> project_map(const SkyMap& map, int width, int height) {
    if (map.pixels.empty() || map.grid.n_rings() == 0)
        throw std::invalid_argument("project_map: empty map");
    if (width < 1 || height < 1)
        throw std::invalid_argument("project_map: width and height must be >= 1");
    if (map.pixels.size() != static_cast<std::size_t>(map.grid.n_pix))
        throw std::invalid_argument("project_map: pixel count != grid");

    const auto& rings = map.grid.rings;
    std::vector<double> thetas(rings.size());
    for (std::size_t i = 0; i < rings.size(); ++i)
        thetas[i] = std::acos(std::clamp(rings[i].cos_theta, -1.0, 1.0));

    const auto [mn_it, mx_it] = std::minmax_element(map.pixels.begin(), map.pixels.end());
    const double mn = *mn_it, mx = *mx_it;
    const double scale = mx > mn ? 255.0 / (mx - mn) : 0.0;

    std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int y = 0; y < height; ++y) {
        const double theta = (y + 0.5) * std::numbers::pi / height;
        // Nearest ring in colatitude; thetas ascend north to south.
        const auto it = std::lower_bound(thetas.begin(), thetas.end(), theta);
        std::size_t r = static_cast<std::size_t>(it - thetas.begin());
        if (r == thetas.size()) {
            r = thetas.size() - 1;
        } else if (r > 0 && theta - thetas[r - 1] <= thetas[r] - theta) {
            --r;
        }
        const RingDescriptor& ring = rings[r];
        for (int x = 0; x < width; ++x) {
            const double phi = (x + 0.5) * two_pi / width;
            long j = std::lround((phi - ring.phi_0) * ring.n_phi / two_pi);
            j %= ring.n_phi;
            if (j < 0) j += ring.n_phi;
            const double v = map.pixels[static_cast<std::size_t>(ring.pixel_offset + j)];
            gray[static_cast<std::size_t>(y) * width + x] =
                static_cast<std::uint8_t>(std::lround((v - mn) * scale));
        }
    }
    return gray;
}

void write_pgm(const std::string& path, const std::vector<std::uint8_t>& gray, int width,
               int height) {
    if (width < 1 || height < 1 ||
        gray.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("write_pgm: size mismatch");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_pgm: cannot open " + path);
    os << "P5\n" << width << ' ' << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(gray.data()),
             static_cast<std::streamsize>(gray.size()));
    if (!os) throw std::runtime_error("write_pgm: write failed for " + path);
}

}  // namespace sht

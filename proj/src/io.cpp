#include "sht/io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sht {

namespace {

constexpr bool little_native = std::endian::native == std::endian::little;

std::uint64_t swap64(std::uint64_t v) {
    v = (v >> 32) | (v << 32);
    v = ((v & 0xffff0000ffff0000ull) >> 16) | ((v & 0x0000ffff0000ffffull) << 16);
    return ((v & 0xff00ff00ff00ff00ull) >> 8) | ((v & 0x00ff00ff00ff00ffull) << 8);
}

void write_f64_block(std::ostream& os, const double* data, std::size_t n) {
    if constexpr (little_native) {
        os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 8));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t u = swap64(std::bit_cast<std::uint64_t>(data[i]));
            os.write(reinterpret_cast<const char*>(&u), 8);
        }
    }
}

void read_f64_block(std::istream& is, double* data, std::size_t n, const char* what) {
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * 8));
    if (static_cast<std::size_t>(is.gcount()) != n * 8)
        throw std::runtime_error(std::string(what) + ": truncated payload");
    if constexpr (!little_native) {
        for (std::size_t i = 0; i < n; ++i)
            data[i] = std::bit_cast<double>(swap64(std::bit_cast<std::uint64_t>(data[i])));
    }
}

std::ofstream open_out(const std::string& path, const char* what) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error(std::string(what) + ": cannot open " + path);
    return os;
}

std::ifstream open_in(const std::string& path, const char* what) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error(std::string(what) + ": cannot open " + path);
    return is;
}

/// Reads "key value" lines up to "end"; the magic line must already be gone.
std::vector<std::pair<std::string, std::string>> read_header(std::istream& is,
                                                             const char* what) {
    std::vector<std::pair<std::string, std::string>> fields;
    std::string line;
    while (std::getline(is, line)) {
        if (line == "end") return fields;
        const auto sp = line.find(' ');
        if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size())
            throw std::runtime_error(std::string(what) + ": malformed header line '" + line + "'");
        fields.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    throw std::runtime_error(std::string(what) + ": header missing 'end'");
}

long long header_int(const std::vector<std::pair<std::string, std::string>>& fields,
                     const std::string& key, const char* what) {
    for (const auto& [k, v] : fields)
        if (k == key) {
            try {
                return std::stoll(v);
            } catch (const std::exception&) {
                throw std::runtime_error(std::string(what) + ": bad value for " + key);
            }
        }
    throw std::runtime_error(std::string(what) + ": missing header field " + key);
}

std::string header_str(const std::vector<std::pair<std::string, std::string>>& fields,
                       const std::string& key, const char* what) {
    for (const auto& [k, v] : fields)
        if (k == key) return v;
    throw std::runtime_error(std::string(what) + ": missing header field " + key);
}

void expect_magic(std::istream& is, const char* magic, const char* what) {
    std::string line;
    if (!std::getline(is, line) || line != magic)
        throw std::runtime_error(std::string(what) + ": not a " + magic + " file");
}

}  // namespace

void write_map(const std::string& path, const SkyMap& map) {
    if (map.pixels.size() != static_cast<std::size_t>(map.grid.n_pix))
        throw std::invalid_argument("write_map: pixel count != grid");
    auto os = open_out(path, "write_map");
    std::ostringstream head;
    head << "SHTMAP1\n";
    if (map.grid.scheme == GridScheme::healpix_ring) {
        head << "scheme healpix-ring\n";
        head << "nside " << map.grid.nside << "\n";
    } else {
        head << "scheme gauss-legendre\n";
        head << "nrings " << map.grid.n_rings() << "\n";
        head << "nphi " << (map.grid.n_rings() ? map.grid.rings[0].n_phi : 0) << "\n";
    }
    head << "npix " << map.grid.n_pix << "\n";
    head << "end\n";
    os << head.str();
    write_f64_block(os, map.pixels.data(), map.pixels.size());
    if (!os) throw std::runtime_error("write_map: write failed for " + path);
}

SkyMap read_map(const std::string& path) {
    auto is = open_in(path, "read_map");
    expect_magic(is, "SHTMAP1", "read_map");
    const auto fields = read_header(is, "read_map");
    const std::string scheme = header_str(fields, "scheme", "read_map");

    SkyMap map;
    if (scheme == "healpix-ring") {
        map.grid = build_healpix_grid(static_cast<int>(header_int(fields, "nside", "read_map")));
    } else if (scheme == "gauss-legendre") {
        map.grid = build_gauss_legendre_grid(
            static_cast<int>(header_int(fields, "nrings", "read_map")),
            static_cast<int>(header_int(fields, "nphi", "read_map")));
    } else {
        throw std::runtime_error("read_map: unknown scheme " + scheme);
    }
    const long long npix = header_int(fields, "npix", "read_map");
    if (npix != map.grid.n_pix)
        throw std::runtime_error("read_map: npix inconsistent with grid parameters");
    map.pixels.resize(static_cast<std::size_t>(npix));
    read_f64_block(is, map.pixels.data(), map.pixels.size(), "read_map");
    return map;
}

void write_alm(const std::string& path, const AlmSet& alm) {
    auto os = open_out(path, "write_alm");
    os << "SHTALM1\n"
       << "lmax " << alm.lmax << "\n"
       << "mmax " << alm.mmax << "\n"
       << "end\n";
    static_assert(sizeof(cdouble) == 2 * sizeof(double));
    write_f64_block(os, reinterpret_cast<const double*>(alm.values.data()),
                    alm.values.size() * 2);
    if (!os) throw std::runtime_error("write_alm: write failed for " + path);
}

AlmSet read_alm(const std::string& path) {
    auto is = open_in(path, "read_alm");
    expect_magic(is, "SHTALM1", "read_alm");
    const auto fields = read_header(is, "read_alm");
    const int lmax = static_cast<int>(header_int(fields, "lmax", "read_alm"));
    const int mmax = static_cast<int>(header_int(fields, "mmax", "read_alm"));
    if (lmax < 0 || mmax < 0 || lmax < mmax)
        throw std::runtime_error("read_alm: bad band limits");
    AlmSet alm(lmax, mmax);
    read_f64_block(is, reinterpret_cast<double*>(alm.values.data()), alm.values.size() * 2,
                   "read_alm");
    return alm;
}

}  // namespace sht

#pragma once

#include <string>

#include "sht/alm.hpp"

namespace sht {

/// Map container: text header (magic SHTMAP1, grid parameters, "end"), then
/// n_pix little-endian float64 pixels in ring order.
void write_map(const std::string& path, const SkyMap& map);
SkyMap read_map(const std::string& path);

/// Coefficient container: magic SHTALM1, lmax/mmax, "end", then the m-major
/// coefficient list as interleaved little-endian float64 (re, im) pairs.
void write_alm(const std::string& path, const AlmSet& alm);
AlmSet read_alm(const std::string& path);

}  // namespace sht

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sht/alm.hpp"

namespace sht {

/// Counter-based splitmix64: the value at position `index` of the stream
/// keyed by `seed`. Stateless, so any coefficient can be drawn in isolation
/// and cross-language reimplementations can match streams.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index);

/// Uniform draw on the open interval (-1, 1) from stream position `index`.
double uniform_pm1(std::uint64_t seed, std::uint64_t index);

/// Coefficients with Re, Im i.i.d. uniform on (-1,1) and Im(a_{l0}) = 0.
/// The coefficient at storage index k consumes stream positions 2k, 2k+1.
AlmSet random_alm(int lmax, int mmax, std::uint64_t seed);

/// Relative round-trip deviation sqrt(sum|a-b|^2 / sum|a|^2) over the
/// stored triangle.
double roundtrip_error(const AlmSet& a_init, const AlmSet& a_out);

/// Equirectangular projection: row y samples colatitude (y+0.5)*pi/height
/// at the nearest ring, column x the nearest sample of that ring; gray
/// levels scale linearly from the map minimum (0) to maximum (255).
std::vector<std::uint8_t> project_map(const SkyMap& map, int width, int height);

/// Binary PGM (P5, maxval 255).
void write_pgm(const std::string& path, const std::vector<std::uint8_t>& gray, int width,
               int height);

}  // namespace sht

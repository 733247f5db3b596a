#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dnufft/geometry.hpp"
#include "dnufft/points.hpp"

namespace dnufft {

/// "x,y,z,re,im" header followed by one row per particle.
void write_particles_csv(std::ostream& out, const ParticleSet& ps);
ParticleSet read_particles_csv(std::istream& in, int dim, double length);

/// Raw little-endian f64 groups (x, y, z, re, im), no header.
void write_particles_binary(std::ostream& out, const ParticleSet& ps);
ParticleSet read_particles_binary(std::istream& in, int dim, double length);

/// Owned region of a grid as written by write_grid_dump.
struct GridDump {
  std::int64_t dim = 0;
  std::int64_t modes = 0;
  std::int64_t fine = 0;
  std::int64_t halo = 0;
  std::vector<Complex> values;
};

/// Header (dim, N, M, halo) as little-endian int64, then the owned values as
/// interleaved little-endian f64 (re, im) in x-fastest order. The reader takes
/// values up to end of stream.
void write_grid_dump(std::ostream& out, const OversampledGrid& grid);
GridDump read_grid_dump(std::istream& in);

/// "key = value" text with optional "[section]" headers and '#' comments.
/// Keys before the first header go to section "".
using KeyValueSections = std::map<std::string, std::map<std::string, std::string>>;
KeyValueSections parse_key_values(std::istream& in);

std::string trim(const std::string& text);
/// Splits on commas, trimming each piece.
std::vector<std::string> split_list(const std::string& text);
double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);

}  // namespace dnufft

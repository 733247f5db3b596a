#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dnufft/geometry.hpp"
#include "dnufft/types.hpp"

namespace dnufft {

enum class ValueKind { Real, Complex };

/// Nonuniform points with one strength each. Positions are wrapped into
/// [0, L) on construction; real strengths are stored as complex values with
/// zero imaginary part and remembered as real.
class ParticleSet {
 public:
  ParticleSet() = default;
  ParticleSet(int dim, double length, std::vector<Vec3> positions,
              std::vector<Complex> strengths);
  ParticleSet(int dim, double length, std::vector<Vec3> positions,
              std::span<const double> real_strengths);

  /// Unit strengths; the positions-only form used by Type 2.
  static ParticleSet positions_only(int dim, double length, std::vector<Vec3> positions);

  int dim() const { return dim_; }
  double length() const { return length_; }
  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }
  ValueKind kind() const { return kind_; }

  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<Complex>& strengths() const { return strengths_; }
  std::vector<double> real_strengths() const;

  void set_strengths(std::vector<Complex> strengths);
  void set_strengths(std::span<const double> strengths);
  /// Replaces positions, wrapping them into [0, L).
  void set_positions(std::vector<Vec3> positions);

  /// When present, entry i is the index in the source set of particle i.
  const std::optional<std::vector<std::size_t>>& ordering() const { return ordering_; }

  /// Copy of this set with particles rearranged so that result[i] = this[perm[i]].
  ParticleSet permuted(std::span<const std::size_t> perm) const;
  /// Copy holding only the listed particles, in the listed order.
  ParticleSet subset(std::span<const std::size_t> indices) const;

 private:
  int dim_ = 3;
  double length_ = 1.0;
  std::vector<Vec3> positions_;
  std::vector<Complex> strengths_;
  ValueKind kind_ = ValueKind::Complex;
  std::optional<std::vector<std::size_t>> ordering_;
};

/// Wraps x into [0, L).
double wrap_position(double x, double length);

inline constexpr int kMaxMortonBits = 21;

/// Interleaves cell bits with x in bit 0, y in bit 1, z in bit 2 of each
/// group of `dim` bits.
std::uint64_t morton_key(std::span<const std::int64_t> cell, int bits);

/// Bits needed to index `fine` cells per axis.
int morton_bits(int fine);

/// Permutation (result[i] = source index) that orders ps by Morton key of
/// each particle's fine-grid cell; stable.
std::vector<std::size_t> morton_permutation(const ParticleSet& ps, int fine);

/// Counting-sort permutation into tiles; fills tile_offsets (size tiles + 1).
std::vector<std::size_t> bin_permutation(const ParticleSet& ps, const TileLayout& tiles,
                                         std::vector<std::size_t>& tile_offsets);

/// Stable sort by the Morton key of each particle's fine-grid cell.
ParticleSet sort_morton(const ParticleSet& ps, const OversampledGrid& grid);

struct BinnedParticles {
  ParticleSet particles;
  /// tile_offsets[t] is the first particle of tile t; size is tiles + 1.
  std::vector<std::size_t> tile_offsets;
};

/// Counting sort of particles into the tiles of `tiles` (stable within a tile).
/// Every particle's cell must lie in the tiled box.
BinnedParticles sort_bins(const ParticleSet& ps, const TileLayout& tiles);

}  // namespace dnufft

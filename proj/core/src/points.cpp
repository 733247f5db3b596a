#include "dnufft/points.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dnufft/error.hpp"

namespace dnufft {

double wrap_position(double x, double length) {
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  if (r >= length) r -= length;
  return r;
}

namespace {

void canonicalize(std::vector<Vec3>& positions, int dim, double length) {
  for (auto& p : positions) {
    for (int a = 0; a < 3; ++a) {
      if (a >= dim) {
        p[a] = 0.0;
        continue;
      }
      require(std::isfinite(p[a]), ErrorCode::NonFiniteValue, "non-finite particle position");
      if (p[a] < 0.0 || p[a] >= length) p[a] = wrap_position(p[a], length);
    }
  }
}

}  // namespace

ParticleSet::ParticleSet(int dim, double length, std::vector<Vec3> positions,
                         std::vector<Complex> strengths)
    : dim_(dim), length_(length), positions_(std::move(positions)) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dim must be 1, 2 or 3");
  require(length > 0.0, ErrorCode::InvalidArgument, "domain length must be positive");
  canonicalize(positions_, dim_, length_);
  set_strengths(std::move(strengths));
}

ParticleSet::ParticleSet(int dim, double length, std::vector<Vec3> positions,
                         std::span<const double> real_strengths)
    : dim_(dim), length_(length), positions_(std::move(positions)) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dim must be 1, 2 or 3");
  require(length > 0.0, ErrorCode::InvalidArgument, "domain length must be positive");
  canonicalize(positions_, dim_, length_);
  set_strengths(real_strengths);
}

ParticleSet ParticleSet::positions_only(int dim, double length, std::vector<Vec3> positions) {
  std::vector<double> ones(positions.size(), 1.0);
  return ParticleSet(dim, length, std::move(positions), ones);
}

std::vector<double> ParticleSet::real_strengths() const {
  std::vector<double> out(strengths_.size());
  std::transform(strengths_.begin(), strengths_.end(), out.begin(),
                 [](const Complex& c) { return c.real(); });
  return out;
}

void ParticleSet::set_strengths(std::vector<Complex> strengths) {
  require(strengths.size() == positions_.size(), ErrorCode::InvalidArgument,
          "strength count differs from position count");
  for (const auto& s : strengths)
    require(std::isfinite(s.real()) && std::isfinite(s.imag()), ErrorCode::NonFiniteValue,
            "non-finite particle strength");
  strengths_ = std::move(strengths);
  kind_ = ValueKind::Complex;
}

void ParticleSet::set_strengths(std::span<const double> strengths) {
  require(strengths.size() == positions_.size(), ErrorCode::InvalidArgument,
          "strength count differs from position count");
  strengths_.resize(strengths.size());
  for (std::size_t i = 0; i < strengths.size(); ++i) {
    require(std::isfinite(strengths[i]), ErrorCode::NonFiniteValue,
            "non-finite particle strength");
    strengths_[i] = Complex(strengths[i], 0.0);
  }
  kind_ = ValueKind::Real;
}

void ParticleSet::set_positions(std::vector<Vec3> positions) {
  require(positions.size() == strengths_.size(), ErrorCode::InvalidArgument,
          "position count differs from strength count");
  canonicalize(positions, dim_, length_);
  positions_ = std::move(positions);
  ordering_.reset();
}

ParticleSet ParticleSet::permuted(std::span<const std::size_t> perm) const {
  require(perm.size() == size(), ErrorCode::InvalidArgument, "permutation has the wrong size");
  return subset(perm);
}

ParticleSet ParticleSet::subset(std::span<const std::size_t> indices) const {
  for (auto i : indices)
    require(i < size(), ErrorCode::InvalidArgument, "subset index out of range");
  const auto perm = indices;
  ParticleSet out;
  out.dim_ = dim_;
  out.length_ = length_;
  out.kind_ = kind_;
  out.positions_.resize(perm.size());
  out.strengths_.resize(perm.size());
  std::vector<std::size_t> composed(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.positions_[i] = positions_[perm[i]];
    out.strengths_[i] = strengths_[perm[i]];
    composed[i] = ordering_ ? (*ordering_)[perm[i]] : perm[i];
  }
  out.ordering_ = std::move(composed);
  return out;
}

std::uint64_t morton_key(std::span<const std::int64_t> cell, int bits) {
  const auto dim = static_cast<int>(cell.size());
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "morton key needs 1 to 3 axes");
  require(bits >= 0 && bits <= kMaxMortonBits && dim * bits <= 63, ErrorCode::IndexOverflow,
          "morton key wider than 63 bits");
  std::uint64_t key = 0;
  for (int a = 0; a < dim; ++a) {
    require(cell[a] >= 0 && cell[a] < (std::int64_t{1} << bits),
            ErrorCode::IndexOverflow, "cell index does not fit in the morton bit budget");
    auto v = static_cast<std::uint64_t>(cell[a]);
    for (int b = 0; b < bits; ++b) key |= ((v >> b) & 1u) << (b * dim + a);
  }
  return key;
}

int morton_bits(int fine) {
  int bits = 0;
  while ((std::int64_t{1} << bits) < fine) ++bits;
  return bits;
}

std::vector<std::size_t> morton_permutation(const ParticleSet& ps, int fine) {
  const int dim = ps.dim();
  const int bits = morton_bits(fine);
  std::vector<std::uint64_t> keys(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Index3 c = cell_of(ps.positions()[i], dim, fine, ps.length());
    keys[i] = morton_key(std::span<const std::int64_t>(c.data(), static_cast<std::size_t>(dim)), bits);
  }
  std::vector<std::size_t> perm(ps.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return perm;
}

ParticleSet sort_morton(const ParticleSet& ps, const OversampledGrid& grid) {
  return ps.permuted(morton_permutation(ps, grid.fine()));
}

std::vector<std::size_t> bin_permutation(const ParticleSet& ps, const TileLayout& tiles,
                                         std::vector<std::size_t>& tile_offsets) {
  const std::size_t ntiles = tiles.tiles.size();
  std::vector<std::size_t> tile_of(ps.size());
  std::vector<std::size_t> counts(ntiles + 1, 0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Index3 c = cell_of(ps.positions()[i], ps.dim(), tiles.fine, ps.length());
    require(tiles.owned.contains(c), ErrorCode::InvalidArgument,
            "particle cell outside the tiled box");
    tile_of[i] = tiles.tile_of_cell(c);
    ++counts[tile_of[i] + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  std::vector<std::size_t> perm(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) perm[cursor[tile_of[i]]++] = i;
  tile_offsets = std::move(counts);
  return perm;
}

BinnedParticles sort_bins(const ParticleSet& ps, const TileLayout& tiles) {
  BinnedParticles out;
  auto perm = bin_permutation(ps, tiles, out.tile_offsets);
  out.particles = ps.permuted(perm);
  return out;
}

}  // namespace dnufft

#pragma once

#include <array>
#include <string>

#include "dnufft/geometry.hpp"
#include "dnufft/points.hpp"
#include "dnufft/window.hpp"

namespace dnufft {

enum class SpreadAlgorithm { Atomic, Tiled, GridParallel };

const char* to_string(SpreadAlgorithm algorithm) noexcept;
SpreadAlgorithm parse_spread_algorithm(const std::string& name);

/// Spreading algorithm plus its tuning knobs. The tile parameters are ignored
/// by Atomic; `team_size` only affects GridParallel.
struct SpreadVariant {
  SpreadAlgorithm algorithm = SpreadAlgorithm::Atomic;
  std::array<int, 3> tile = kDefaultTile;
  int team_size = 4;
  int z_split = 0;  // 0: default_z_split(w)

  bool operator==(const SpreadVariant&) const = default;
};

/// Adds  sum_j f_j prod_axis phi(z_axis)  to every cell of `grid` touched by
/// a particle stencil.
///
/// Contributions past the owned box land in the halo. A grid that owns the
/// whole periodic domain is folded afterwards, so it holds the periodic
/// result with a zero halo; a decomposed grid keeps its halo for
/// halo_accumulate.
///
/// Requirements: grid.halo() == ceil(w/2), matching dimension and domain
/// length, and every particle cell inside grid.owned().
void spread(const ParticleSet& ps, const WindowSpec& spec, OversampledGrid& grid,
            const SpreadVariant& variant, const Execution& exec = {});

/// Same deposit as spread() but never folds the halo, leaving halo
/// contributions for an explicit fold or exchange.
void spread_into_halo(const ParticleSet& ps, const WindowSpec& spec, OversampledGrid& grid,
                      const SpreadVariant& variant, const Execution& exec = {});

}  // namespace dnufft

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dnufft/geometry.hpp"
#include "dnufft/points.hpp"
#include "dnufft/window.hpp"

namespace dnufft {

enum class InterpOrdering { Direct, Morton, Bin };

const char* to_string(InterpOrdering ordering) noexcept;
InterpOrdering parse_interp_ordering(const std::string& name);

/// out_j = sum over the stencil of x_j of grid[i] * prod_axis phi(z_axis):
/// the transpose of spread, using identical stencils and weights.
///
/// Sorted orderings gather in Morton or tile order and scatter the results
/// back, so out_j always refers to particle j of `ps`. The grid halo must be
/// fresh (filled after the last write); a stale halo is rejected.
std::vector<Complex> interpolate(const OversampledGrid& grid, const ParticleSet& ps,
                                 const WindowSpec& spec, InterpOrdering ordering,
                                 const Execution& exec = {},
                                 std::array<int, 3> tile = kDefaultTile);

/// Interpolates several grids of identical shape at once, sharing the
/// stencil computation. Result k belongs to grids[k].
std::vector<std::vector<Complex>> interpolate_many(
    std::span<const OversampledGrid* const> grids, const ParticleSet& ps,
    const WindowSpec& spec, InterpOrdering ordering, const Execution& exec = {},
    std::array<int, 3> tile = kDefaultTile);

}  // namespace dnufft

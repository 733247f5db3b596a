#include "dnufft/spread.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

#include "dnufft/error.hpp"
#include "kernel_common.hpp"

namespace dnufft {

const char* to_string(SpreadAlgorithm algorithm) noexcept {
  switch (algorithm) {
    case SpreadAlgorithm::Atomic: return "atomic";
    case SpreadAlgorithm::Tiled: return "tiled";
    case SpreadAlgorithm::GridParallel: return "gridpar";
  }
  return "unknown";
}

SpreadAlgorithm parse_spread_algorithm(const std::string& name) {
  if (name == "atomic") return SpreadAlgorithm::Atomic;
  if (name == "tiled") return SpreadAlgorithm::Tiled;
  if (name == "gridpar" || name == "grid-parallel") return SpreadAlgorithm::GridParallel;
  fail(ErrorCode::InvalidArgument, "unknown spread variant '" + name + "'");
}

namespace {

using detail::FixedStencil;

inline void atomic_add(Complex& target, Complex v) {
  auto* p = reinterpret_cast<double*>(&target);
#pragma omp atomic
  p[0] += v.real();
#pragma omp atomic
  p[1] += v.imag();
}

/// Adds v * weights over z offsets [z0, z1) of the stencil. `origin` points
/// at the cell of stencil offset (0, 0, 0); sy and sz are the row and plane
/// strides of the target array.
template <int W, bool Atomic>
inline void deposit(Complex* origin, std::int64_t sy, std::int64_t sz,
                    const FixedStencil<W>& st, int ny, int z0, int z1, Complex v) {
  // v times the x weights as 2W interleaved doubles.
  double vx[2 * W];
  for (int dx = 0; dx < W; ++dx) {
    vx[2 * dx] = v.real() * st.weight[0][dx];
    vx[2 * dx + 1] = v.imag() * st.weight[0][dx];
  }
  for (int dz = z0; dz < z1; ++dz)
    for (int dy = 0; dy < ny; ++dy) {
      const double wyz = st.weight[2][dz] * st.weight[1][dy];
      auto* row = reinterpret_cast<double*>(origin + dz * sz + dy * sy);
      if constexpr (Atomic) {
        for (int d = 0; d < 2 * W; ++d) {
#pragma omp atomic
          row[d] += wyz * vx[d];
        }
      } else {
#pragma omp simd
        for (int d = 0; d < 2 * W; ++d) row[d] += wyz * vx[d];
      }
    }
}

struct SpreadContext {
  const ParticleSet& ps;
  const WindowSpec& spec;
  OversampledGrid& grid;
  const SpreadVariant& variant;
  int threads;
  int ny() const { return grid.dim() >= 2 ? spec.width : 1; }
  int nz() const { return grid.dim() >= 3 ? spec.width : 1; }
};

template <int W>
void spread_atomic(SpreadContext& ctx) {
  const auto& pos = ctx.ps.positions();
  const auto& str = ctx.ps.strengths();
  const int dim = ctx.grid.dim();
  const int fine = ctx.grid.fine();
  const double length = ctx.grid.length();
  const double beta = ctx.spec.beta;
  const int ny = ctx.ny();
  const int nz = ctx.nz();
  const auto sy = ctx.grid.stride(1);
  const auto sz = ctx.grid.stride(2);
  Complex* data = ctx.grid.mutable_values().data();
  const auto n = static_cast<std::int64_t>(pos.size());

  if (ctx.threads == 1) {
    FixedStencil<W> st{};
    for (std::int64_t j = 0; j < n; ++j) {
      detail::compute_stencil<W>(pos[j], dim, fine, length, beta, st);
      Complex* origin = data + ctx.grid.offset(st.base[0], st.base[1], st.base[2]);
      deposit<W, false>(origin, sy, sz, st, ny, 0, nz, str[j]);
    }
    return;
  }
#pragma omp parallel num_threads(ctx.threads)
  {
    FixedStencil<W> st{};
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
      detail::compute_stencil<W>(pos[j], dim, fine, length, beta, st);
      Complex* origin = data + ctx.grid.offset(st.base[0], st.base[1], st.base[2]);
      deposit<W, true>(origin, sy, sz, st, ny, 0, nz, str[j]);
    }
  }
}

TileLayout layout_for(const SpreadContext& ctx) {
  const int z_split = ctx.variant.z_split > 0 ? ctx.variant.z_split : default_z_split(ctx.spec.width);
  std::array<int, 3> tile = ctx.variant.tile;
  for (int a = 0; a < ctx.grid.dim(); ++a)
    tile[a] = static_cast<int>(std::min<std::int64_t>(tile[a], ctx.grid.owned().extent(a)));
  return build_tiles(ctx.grid, tile, z_split, ctx.spec.width);
}

template <int W>
void spread_tiled(SpreadContext& ctx) {
  const TileLayout layout = layout_for(ctx);
  const BinnedParticles binned = sort_bins(ctx.ps, layout);
  const auto& pos = binned.particles.positions();
  const auto& str = binned.particles.strengths();
  const int dim = ctx.grid.dim();
  const int fine = ctx.grid.fine();
  const double length = ctx.grid.length();
  const double beta = ctx.spec.beta;
  const int ny = ctx.ny();
  Complex* data = ctx.grid.mutable_values().data();

  std::size_t max_hist = 0;
  for (const auto& t : layout.tiles) max_hist = std::max(max_hist, t.hist_volume());
  const auto ntasks = static_cast<std::int64_t>(layout.tiles.size()) * layout.z_split;
  const bool atomic_flush = ctx.threads > 1;

#pragma omp parallel num_threads(ctx.threads)
  {
    std::vector<Complex> hist(max_hist);
    FixedStencil<W> st{};
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t task = 0; task < ntasks; ++task) {
      const auto t = static_cast<std::size_t>(task / layout.z_split);
      const int slice = static_cast<int>(task % layout.z_split);
      const std::size_t begin = binned.tile_offsets[t];
      const std::size_t end = binned.tile_offsets[t + 1];
      if (begin == end) continue;
      const Tile& tile = layout.tiles[t];
      const auto [z0, z1] = layout.z_offsets(slice);
      const auto hx = tile.hist_extent[0];
      const auto hy = tile.hist_extent[1];
      const auto hsz = hx * hy;
      std::fill(hist.begin(), hist.begin() + static_cast<std::ptrdiff_t>(tile.hist_volume()), Complex{});

      for (std::size_t j = begin; j < end; ++j) {
        detail::compute_stencil<W>(pos[j], dim, fine, length, beta, st);
        Complex* origin = hist.data() + (st.base[0] - tile.hist_origin[0]) +
                          hx * (st.base[1] - tile.hist_origin[1]) +
                          hsz * (st.base[2] - tile.hist_origin[2]);
        deposit<W, false>(origin, hx, hsz, st, ny, z0, z1, str[j]);
      }

      // Flush only the planes this slice can have touched.
      std::int64_t plane_lo = 0;
      std::int64_t plane_hi = tile.hist_extent[2];
      if (dim == 3) {
        plane_lo = z0;
        plane_hi = std::min<std::int64_t>(plane_hi, tile.cells.extent(2) + z1);
      }
      for (auto pz = plane_lo; pz < plane_hi; ++pz)
        for (std::int64_t py = 0; py < hy; ++py) {
          const Complex* src = hist.data() + py * hx + pz * hsz;
          Complex* dst = data + ctx.grid.offset(tile.hist_origin[0], tile.hist_origin[1] + py,
                                                tile.hist_origin[2] + pz);
          if (atomic_flush) {
            for (std::int64_t px = 0; px < hx; ++px)
              if (src[px] != Complex{}) atomic_add(dst[px], src[px]);
          } else {
            for (std::int64_t px = 0; px < hx; ++px) dst[px] += src[px];
          }
        }
    }
  }
}

template <int W>
void spread_grid_parallel(SpreadContext& ctx) {
  const TileLayout layout = layout_for(ctx);
  const BinnedParticles binned = sort_bins(ctx.ps, layout);
  const auto& pos = binned.particles.positions();
  const auto& str = binned.particles.strengths();
  const int dim = ctx.grid.dim();
  const int fine = ctx.grid.fine();
  const double length = ctx.grid.length();
  const double beta = ctx.spec.beta;
  const int ny = ctx.ny();
  const int nz = ctx.nz();
  Complex* data = ctx.grid.mutable_values().data();

  std::size_t max_hist = 0;
  std::size_t max_count = 0;
  for (std::size_t t = 0; t < layout.tiles.size(); ++t) {
    max_hist = std::max(max_hist, layout.tiles[t].hist_volume());
    max_count = std::max(max_count, binned.tile_offsets[t + 1] - binned.tile_offsets[t]);
  }
  // Team-shared scratch: the tile histogram and the stencils of its particles.
  std::vector<Complex> hist(max_hist);
  std::vector<FixedStencil<W>> stencils(max_count);
  const int team = std::max(1, std::min(ctx.variant.team_size, ctx.threads));

#pragma omp parallel num_threads(team)
  {
    const int me = omp_get_thread_num();
    const int members = omp_get_num_threads();
    for (std::size_t t = 0; t < layout.tiles.size(); ++t) {
      const std::size_t begin = binned.tile_offsets[t];
      const auto count = static_cast<std::int64_t>(binned.tile_offsets[t + 1] - begin);
      if (count == 0) continue;
      const Tile& tile = layout.tiles[t];
      const auto hx = tile.hist_extent[0];
      const auto hy = tile.hist_extent[1];
      const auto hsz = hx * hy;

#pragma omp for schedule(static)
      for (std::int64_t j = 0; j < count; ++j)
        detail::compute_stencil<W>(pos[begin + j], dim, fine, length, beta, stencils[j]);

      // Worker `me` owns the histogram planes p with p % members == me, so
      // every histogram cell has exactly one writer.
      for (std::int64_t j = 0; j < count; ++j) {
        const auto& st = stencils[j];
        const auto plane0 = st.base[2] - tile.hist_origin[2];
        Complex* origin = hist.data() + (st.base[0] - tile.hist_origin[0]) +
                          hx * (st.base[1] - tile.hist_origin[1]) + hsz * plane0;
        const Complex v = str[begin + j];
        for (int dz = 0; dz < nz; ++dz) {
          if ((plane0 + dz) % members != me) continue;
          deposit<W, false>(origin, hx, hsz, st, ny, dz, dz + 1, v);
        }
      }
#pragma omp barrier

#pragma omp for schedule(static)
      for (std::int64_t pz = 0; pz < tile.hist_extent[2]; ++pz)
        for (std::int64_t py = 0; py < hy; ++py) {
          Complex* src = hist.data() + py * hx + pz * hsz;
          Complex* dst = data + ctx.grid.offset(tile.hist_origin[0], tile.hist_origin[1] + py,
                                                tile.hist_origin[2] + pz);
          for (std::int64_t px = 0; px < hx; ++px) {
            dst[px] += src[px];
            src[px] = Complex{};
          }
        }
    }
  }
}

}  // namespace

void spread_into_halo(const ParticleSet& ps, const WindowSpec& spec, OversampledGrid& grid,
                      const SpreadVariant& variant, const Execution& exec) {
  detail::check_grid_matches(ps, spec, grid);
  detail::check_particles_owned(ps, grid);
  require(variant.team_size >= 1, ErrorCode::InvalidArgument, "team size must be >= 1");
  SpreadContext ctx{ps, spec, grid, variant, exec.resolved_threads()};
  if (!ps.empty()) {
    detail::dispatch_width(spec.width, [&]<int W>() {
      switch (variant.algorithm) {
        case SpreadAlgorithm::Atomic: spread_atomic<W>(ctx); break;
        case SpreadAlgorithm::Tiled: spread_tiled<W>(ctx); break;
        case SpreadAlgorithm::GridParallel: spread_grid_parallel<W>(ctx); break;
      }
    });
  }
}

void spread(const ParticleSet& ps, const WindowSpec& spec, OversampledGrid& grid,
            const SpreadVariant& variant, const Execution& exec) {
  spread_into_halo(ps, spec, grid, variant, exec);
  if (grid.is_global()) fold_halo_periodic(grid);
}

}  // namespace dnufft

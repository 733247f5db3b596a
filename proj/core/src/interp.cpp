#include "dnufft/interp.hpp"

#include <algorithm>

#include "dnufft/error.hpp"
#include "kernel_common.hpp"

namespace dnufft {

const char* to_string(InterpOrdering ordering) noexcept {
  switch (ordering) {
    case InterpOrdering::Direct: return "direct";
    case InterpOrdering::Morton: return "morton";
    case InterpOrdering::Bin: return "bin";
  }
  return "unknown";
}

InterpOrdering parse_interp_ordering(const std::string& name) {
  if (name == "direct") return InterpOrdering::Direct;
  if (name == "morton") return InterpOrdering::Morton;
  if (name == "bin") return InterpOrdering::Bin;
  fail(ErrorCode::InvalidArgument, "unknown interpolation ordering '" + name + "'");
}

namespace {

using detail::FixedStencil;

/// Weighted sum over the stencil. Rows are read as 2W interleaved doubles
/// and accumulated lane-wise, then contracted with the x weights.
template <int W>
inline Complex gather(const Complex* origin, std::int64_t sy, std::int64_t sz,
                      const FixedStencil<W>& st, int ny, int nz) {
  double acc[2 * W] = {};
  for (int dz = 0; dz < nz; ++dz)
    for (int dy = 0; dy < ny; ++dy) {
      const double wyz = st.weight[2][dz] * st.weight[1][dy];
      const auto* row = reinterpret_cast<const double*>(origin + dz * sz + dy * sy);
#pragma omp simd
      for (int d = 0; d < 2 * W; ++d) acc[d] += wyz * row[d];
    }
  double re = 0.0;
  double im = 0.0;
  for (int dx = 0; dx < W; ++dx) {
    re += acc[2 * dx] * st.weight[0][dx];
    im += acc[2 * dx + 1] * st.weight[0][dx];
  }
  return {re, im};
}

template <int W>
void interp_kernel(std::span<const OversampledGrid* const> grids, const ParticleSet& ps,
                   double beta, int threads, std::vector<std::vector<Complex>>& out) {
  const OversampledGrid& g0 = *grids[0];
  const int dim = g0.dim();
  const int fine = g0.fine();
  const double length = g0.length();
  const int ny = dim >= 2 ? W : 1;
  const int nz = dim >= 3 ? W : 1;
  const auto sy = g0.stride(1);
  const auto sz = g0.stride(2);
  const auto& pos = ps.positions();
  const auto n = static_cast<std::int64_t>(pos.size());
  const std::size_t ngrids = grids.size();

#pragma omp parallel num_threads(threads)
  {
    FixedStencil<W> st{};
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
      detail::compute_stencil<W>(pos[j], dim, fine, length, beta, st);
      const std::size_t off = g0.offset(st.base[0], st.base[1], st.base[2]);
      for (std::size_t g = 0; g < ngrids; ++g)
        out[g][j] = gather<W>(grids[g]->values().data() + off, sy, sz, st, ny, nz);
    }
  }
}

}  // namespace

std::vector<std::vector<Complex>> interpolate_many(
    std::span<const OversampledGrid* const> grids, const ParticleSet& ps,
    const WindowSpec& spec, InterpOrdering ordering, const Execution& exec,
    std::array<int, 3> tile) {
  require(!grids.empty(), ErrorCode::InvalidArgument, "no grids to interpolate");
  const OversampledGrid& g0 = *grids[0];
  for (const auto* g : grids) {
    require(g->owned() == g0.owned() && g->halo() == g0.halo() && g->fine() == g0.fine() &&
                g->dim() == g0.dim(),
            ErrorCode::InvalidArgument, "interpolated grids differ in shape");
    require(g->halo_fresh(), ErrorCode::StaleHalo,
            "grid halo is stale; fill it before interpolating");
  }
  detail::check_grid_matches(ps, spec, g0);
  detail::check_particles_owned(ps, g0);

  std::vector<std::vector<Complex>> out(grids.size(), std::vector<Complex>(ps.size()));
  if (ps.empty()) return out;
  const int threads = exec.resolved_threads();

  if (ordering == InterpOrdering::Direct) {
    detail::dispatch_width(spec.width, [&]<int W>() { interp_kernel<W>(grids, ps, spec.beta, threads, out); });
    return out;
  }

  std::vector<std::size_t> perm;
  if (ordering == InterpOrdering::Morton) {
    perm = morton_permutation(ps, g0.fine());
  } else {
    for (int a = 0; a < g0.dim(); ++a)
      tile[a] = static_cast<int>(std::min<std::int64_t>(tile[a], g0.owned().extent(a)));
    std::vector<std::size_t> offsets;
    perm = bin_permutation(ps, build_tiles(g0, tile, 1, spec.width), offsets);
  }
  const ParticleSet sorted = ps.permuted(perm);
  std::vector<std::vector<Complex>> in_order(grids.size(), std::vector<Complex>(ps.size()));
  detail::dispatch_width(spec.width, [&]<int W>() { interp_kernel<W>(grids, sorted, spec.beta, threads, in_order); });
  for (std::size_t g = 0; g < grids.size(); ++g)
    for (std::size_t i = 0; i < perm.size(); ++i) out[g][perm[i]] = in_order[g][i];
  return out;
}

std::vector<Complex> interpolate(const OversampledGrid& grid, const ParticleSet& ps,
                                 const WindowSpec& spec, InterpOrdering ordering,
                                 const Execution& exec, std::array<int, 3> tile) {
  const OversampledGrid* one[] = {&grid};
  return std::move(interpolate_many(one, ps, spec, ordering, exec, tile).front());
}

}  // namespace dnufft

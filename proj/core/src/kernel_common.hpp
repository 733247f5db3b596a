#pragma once

// Shared pieces of the spreading and interpolation kernels. Not installed.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "dnufft/error.hpp"
#include "dnufft/geometry.hpp"
#include "dnufft/points.hpp"
#include "dnufft/window.hpp"

namespace dnufft::detail {

/// Stencil with the width fixed at compile time. Inactive axes carry a
/// single unit weight at index 0.
template <int W>
struct FixedStencil {
  Index3 base{0, 0, 0};
  alignas(64) double weight[3][W];
};

template <int W>
inline void compute_stencil(const Vec3& x, int dim, int fine, double length, double beta,
                            FixedStencil<W>& st) {
  constexpr double scale = 2.0 / W;
  // Padded to whole vector lanes so the batch has no scalar tail.
  constexpr int kPadded = (3 * W + 7) / 8 * 8;
  alignas(64) double z[kPadded] = {};
  for (int a = 0; a < dim; ++a) {
    const double u = fine_coordinate(x[a], fine, length);
    st.base[a] = static_cast<std::int64_t>(std::ceil(u - 0.5 * W));
    for (int j = 0; j < W; ++j) z[a * W + j] = (u - static_cast<double>(st.base[a] + j)) * scale;
  }
  const int count = (dim * W + 3) / 4 * 4;
  es_eval_inplace(z, static_cast<std::size_t>(count), beta);
  for (int a = 0; a < dim; ++a)
    for (int j = 0; j < W; ++j) st.weight[a][j] = z[a * W + j];
  for (int a = dim; a < 3; ++a) {
    st.base[a] = 0;
    st.weight[a][0] = 1.0;
  }
}

inline void check_grid_matches(const ParticleSet& ps, const WindowSpec& spec,
                               const OversampledGrid& grid) {
  require(spec.width >= kMinWidth && spec.width <= kMaxWidth, ErrorCode::WidthMismatch,
          "window width unsupported");
  require(grid.halo() == spec.halo_width(), ErrorCode::WidthMismatch,
          "grid halo " + std::to_string(grid.halo()) + " does not match ceil(w/2) = " +
              std::to_string(spec.halo_width()));
  require(ps.dim() == grid.dim(), ErrorCode::InvalidArgument,
          "particle and grid dimensions differ");
  require(ps.length() == grid.length(), ErrorCode::InvalidArgument,
          "particle and grid domain lengths differ");
}

inline void check_particles_owned(const ParticleSet& ps, const OversampledGrid& grid) {
  if (grid.is_global()) return;
  for (const auto& x : ps.positions()) {
    Index3 c = cell_of(x, ps.dim(), grid.fine(), ps.length());
    require(grid.owned().contains(c), ErrorCode::PositionOutOfDomain,
            "particle cell outside the grid's owned box");
  }
}

/// Calls f.template operator()<W>() with W equal to the runtime width.
template <typename F>
decltype(auto) dispatch_width(int width, F&& f) {
  switch (width) {
    case 2: return f.template operator()<2>();
    case 3: return f.template operator()<3>();
    case 4: return f.template operator()<4>();
    case 5: return f.template operator()<5>();
    case 6: return f.template operator()<6>();
    case 7: return f.template operator()<7>();
    case 8: return f.template operator()<8>();
    case 9: return f.template operator()<9>();
    case 10: return f.template operator()<10>();
    case 11: return f.template operator()<11>();
    case 12: return f.template operator()<12>();
    case 13: return f.template operator()<13>();
    case 14: return f.template operator()<14>();
    case 15: return f.template operator()<15>();
    case 16: return f.template operator()<16>();
    default: fail(ErrorCode::WidthMismatch, "no kernel specialization for width " + std::to_string(width));
  }
}

}  // namespace dnufft::detail

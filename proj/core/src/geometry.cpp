#include "dnufft/geometry.hpp"

#include <algorithm>
#include <string>

#include "dnufft/error.hpp"

namespace dnufft {

OversampledGrid::OversampledGrid(int dim, int modes, double length, int halo, Box owned)
    : dim_(dim), modes_(modes), fine_(2 * modes), length_(length), halo_(halo), owned_(owned) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dim must be 1, 2 or 3");
  require(modes >= 2 && modes % 2 == 0, ErrorCode::InvalidArgument,
          "mode count must be even and >= 2");
  require(length > 0.0, ErrorCode::InvalidArgument, "domain length must be positive");
  require(halo >= 0, ErrorCode::InvalidArgument, "halo width must be non-negative");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      require(owned.lo[a] == 0 && owned.hi[a] == 1, ErrorCode::InvalidArgument,
              "inactive axes must span [0, 1)");
    } else {
      require(owned.lo[a] >= 0 && owned.hi[a] <= fine_ && owned.lo[a] < owned.hi[a],
              ErrorCode::InvalidArgument, "owned box outside the fine grid");
    }
    ext_[a] = owned.extent(a) + 2 * halo_on(a);
  }
  strides_ = {1, ext_[0], ext_[0] * ext_[1]};
  values_.assign(static_cast<std::size_t>(ext_[0] * ext_[1] * ext_[2]), Complex{});
}

OversampledGrid OversampledGrid::global(int dim, int modes, double length, int halo) {
  Box box;
  for (int a = 0; a < dim; ++a) box.hi[a] = 2 * modes;
  return OversampledGrid(dim, modes, length, halo, box);
}

bool OversampledGrid::is_global() const {
  for (int a = 0; a < dim_; ++a)
    if (owned_.lo[a] != 0 || owned_.hi[a] != fine_) return false;
  return true;
}

Index3 OversampledGrid::storage_origin() const {
  return {owned_.lo[0] - halo_on(0), owned_.lo[1] - halo_on(1), owned_.lo[2] - halo_on(2)};
}

void OversampledGrid::clear() {
  std::fill(values_.begin(), values_.end(), Complex{});
  ++data_generation_;
  mark_halo_fresh();
}

std::vector<Complex> OversampledGrid::owned_values() const {
  std::vector<Complex> packed(owned_.volume());
  const auto n0 = owned_.extent(0);
  std::size_t k = 0;
  for (auto i2 = owned_.lo[2]; i2 < owned_.hi[2]; ++i2)
    for (auto i1 = owned_.lo[1]; i1 < owned_.hi[1]; ++i1) {
      const Complex* row = values_.data() + offset(owned_.lo[0], i1, i2);
      std::copy(row, row + n0, packed.begin() + static_cast<std::ptrdiff_t>(k));
      k += static_cast<std::size_t>(n0);
    }
  return packed;
}

void OversampledGrid::set_owned_values(std::span<const Complex> packed) {
  require(packed.size() == owned_.volume(), ErrorCode::InvalidArgument,
          "packed owned block has the wrong size");
  const auto n0 = owned_.extent(0);
  std::size_t k = 0;
  for (auto i2 = owned_.lo[2]; i2 < owned_.hi[2]; ++i2)
    for (auto i1 = owned_.lo[1]; i1 < owned_.hi[1]; ++i1) {
      std::copy(packed.begin() + static_cast<std::ptrdiff_t>(k),
                packed.begin() + static_cast<std::ptrdiff_t>(k + n0),
                values_.begin() + static_cast<std::ptrdiff_t>(offset(owned_.lo[0], i1, i2)));
      k += static_cast<std::size_t>(n0);
    }
  ++data_generation_;
}

Stencil stencil_for(const Vec3& x, const WindowSpec& spec, const OversampledGrid& grid) {
  require(spec.width >= kMinWidth && spec.width <= kMaxWidth, ErrorCode::WidthMismatch,
          "window width unsupported");
  Stencil st;
  st.dim = grid.dim();
  st.width = spec.width;
  for (int a = 0; a < grid.dim(); ++a) {
    require(x[a] >= 0.0 && x[a] < grid.length(), ErrorCode::PositionOutOfDomain,
            "position outside [0, L); wrap before computing stencils");
    double u = fine_coordinate(x[a], grid.fine(), grid.length());
    st.base[a] = axis_stencil(u, spec.width, spec.beta, st.weights[a].data());
  }
  return st;
}

Index3 cell_of(const Vec3& x, int dim, int fine, double length) {
  Index3 cell{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    auto c = static_cast<std::int64_t>(fine_coordinate(x[a], fine, length));
    cell[a] = std::clamp<std::int64_t>(c, 0, fine - 1);
  }
  return cell;
}

std::int64_t wrap_index(std::int64_t i, std::int64_t m) {
  std::int64_t r = i % m;
  return r < 0 ? r + m : r;
}

std::size_t TileLayout::tile_of_cell(const Index3& cell) const {
  std::size_t t = 0;
  std::size_t mult = 1;
  for (int a = 0; a < 3; ++a) {
    auto local = (cell[a] - owned.lo[a]) / tile_extent[a];
    t += static_cast<std::size_t>(local) * mult;
    mult *= static_cast<std::size_t>(counts[a]);
  }
  return t;
}

std::pair<int, int> TileLayout::z_offsets(int slice) const {
  if (dim < 3) return {0, 1};
  return {slice * width / z_split, (slice + 1) * width / z_split};
}

int default_z_split(int width) { return std::min(width, 4); }

TileLayout build_tiles(const OversampledGrid& grid, std::array<int, 3> tile_extent,
                       int z_split, int width) {
  require(width >= kMinWidth && width <= kMaxWidth, ErrorCode::WidthMismatch,
          "window width unsupported");
  require(z_split >= 1, ErrorCode::InvalidArgument, "z split must be >= 1");
  TileLayout layout;
  layout.dim = grid.dim();
  layout.width = width;
  layout.fine = grid.fine();
  layout.owned = grid.owned();
  layout.z_split = grid.dim() == 3 ? std::min(z_split, width) : 1;
  for (int a = 0; a < 3; ++a) {
    if (a >= grid.dim()) {
      layout.tile_extent[a] = 1;
      layout.counts[a] = 1;
      continue;
    }
    require(tile_extent[a] >= 1, ErrorCode::InvalidArgument, "tile extent must be >= 1");
    require(tile_extent[a] <= grid.owned().extent(a), ErrorCode::InvalidArgument,
            "tile extent " + std::to_string(tile_extent[a]) + " exceeds owned box extent " +
                std::to_string(grid.owned().extent(a)));
    layout.tile_extent[a] = tile_extent[a];
    layout.counts[a] = (grid.owned().extent(a) + tile_extent[a] - 1) / tile_extent[a];
  }
  const int below = width / 2;
  layout.tiles.reserve(static_cast<std::size_t>(layout.counts[0] * layout.counts[1] * layout.counts[2]));
  for (std::int64_t t2 = 0; t2 < layout.counts[2]; ++t2)
    for (std::int64_t t1 = 0; t1 < layout.counts[1]; ++t1)
      for (std::int64_t t0 = 0; t0 < layout.counts[0]; ++t0) {
        Tile tile;
        const Index3 t{t0, t1, t2};
        for (int a = 0; a < 3; ++a) {
          tile.cells.lo[a] = layout.owned.lo[a] + t[a] * layout.tile_extent[a];
          tile.cells.hi[a] = std::min(tile.cells.lo[a] + layout.tile_extent[a], layout.owned.hi[a]);
          if (a < grid.dim()) {
            tile.hist_origin[a] = tile.cells.lo[a] - below;
            tile.hist_extent[a] = tile.cells.extent(a) + width;
          } else {
            tile.hist_origin[a] = 0;
            tile.hist_extent[a] = 1;
          }
        }
        layout.tiles.push_back(tile);
      }
  return layout;
}

namespace {

// Visits every stored cell whose index along `axis` lies outside the owned
// range, paired with its periodic image inside the owned range. With
// `later_axes_owned`, axes after `axis` are restricted to the owned range.
template <typename F>
void for_each_halo_cell(const OversampledGrid& grid, int axis, bool later_axes_owned, F&& f) {
  Index3 origin = grid.storage_origin();
  Index3 end{origin[0] + grid.extended_extent(0), origin[1] + grid.extended_extent(1),
             origin[2] + grid.extended_extent(2)};
  if (later_axes_owned)
    for (int a = axis + 1; a < 3; ++a) {
      origin[a] = grid.owned().lo[a];
      end[a] = grid.owned().hi[a];
    }
  const auto m = grid.fine();
  for (auto i2 = origin[2]; i2 < end[2]; ++i2)
    for (auto i1 = origin[1]; i1 < end[1]; ++i1)
      for (auto i0 = origin[0]; i0 < end[0]; ++i0) {
        Index3 i{i0, i1, i2};
        if (i[axis] >= 0 && i[axis] < m) continue;
        Index3 img = i;
        img[axis] = wrap_index(i[axis], m);
        f(grid.offset(i[0], i[1], i[2]), grid.offset(img[0], img[1], img[2]));
      }
}

}  // namespace

void fold_halo_periodic(OversampledGrid& grid) {
  require(grid.is_global(), ErrorCode::InvalidArgument,
          "periodic fold requires a grid owning the whole domain");
  if (grid.halo() == 0) return;
  auto v = grid.mutable_values();
  for (int axis = 0; axis < grid.dim(); ++axis)
    for_each_halo_cell(grid, axis, false, [&](std::size_t src, std::size_t dst) {
      v[dst] += v[src];
      v[src] = Complex{};
    });
}

void fill_halo_periodic(OversampledGrid& grid) {
  require(grid.is_global(), ErrorCode::InvalidArgument,
          "periodic fill requires a grid owning the whole domain");
  if (grid.halo() > 0) {
    auto v = grid.mutable_values();
    // x, then y, then z: each pass reads images whose earlier axes are
    // already filled, which covers edges and corners.
    for (int axis = 0; axis < grid.dim(); ++axis)
      for_each_halo_cell(grid, axis, true, [&](std::size_t dst, std::size_t src) { v[dst] = v[src]; });
  }
  grid.mark_halo_fresh();
}

}  // namespace dnufft

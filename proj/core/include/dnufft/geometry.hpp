#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dnufft/types.hpp"
#include "dnufft/window.hpp"

namespace dnufft {

struct DomainBox {
  double length = 0.0;
  int dim = 3;
};

/// Half-open box of global fine-grid indices, [lo, hi) per axis. Axes beyond
/// the problem dimension are [0, 1).
struct Box {
  Index3 lo{0, 0, 0};
  Index3 hi{1, 1, 1};

  std::int64_t extent(int axis) const { return hi[axis] - lo[axis]; }
  std::size_t volume() const {
    return static_cast<std::size_t>(extent(0) * extent(1) * extent(2));
  }
  bool contains(const Index3& i) const {
    return i[0] >= lo[0] && i[0] < hi[0] && i[1] >= lo[1] && i[1] < hi[1] &&
           i[2] >= lo[2] && i[2] < hi[2];
  }
  bool operator==(const Box&) const = default;
};

/// Complex values on (a piece of) the oversampled grid. The array covers the
/// owned box extended by `halo` cells on both sides of every active axis;
/// storage is x fastest, z slowest.
class OversampledGrid {
 public:
  OversampledGrid() = default;
  OversampledGrid(int dim, int modes, double length, int halo, Box owned);

  /// Grid owning the whole periodic domain (single-rank mode).
  static OversampledGrid global(int dim, int modes, double length, int halo);

  int dim() const { return dim_; }
  int modes() const { return modes_; }
  int fine() const { return fine_; }
  double length() const { return length_; }
  double spacing() const { return length_ / fine_; }
  int halo() const { return halo_; }
  int halo_on(int axis) const { return axis < dim_ ? halo_ : 0; }
  int fine_on(int axis) const { return axis < dim_ ? fine_ : 1; }
  const Box& owned() const { return owned_; }
  bool is_global() const;

  std::int64_t stride(int axis) const { return strides_[axis]; }
  std::int64_t extended_extent(int axis) const { return ext_[axis]; }
  std::size_t size() const { return values_.size(); }

  /// Storage offset of a global index (may address halo cells).
  std::size_t offset(std::int64_t i0, std::int64_t i1 = 0, std::int64_t i2 = 0) const {
    return static_cast<std::size_t>((i0 - owned_.lo[0] + halo_on(0)) +
                                    strides_[1] * (i1 - owned_.lo[1] + halo_on(1)) +
                                    strides_[2] * (i2 - owned_.lo[2] + halo_on(2)));
  }
  /// Lowest global index stored along each axis (owned.lo - halo).
  Index3 storage_origin() const;

  Complex at(std::int64_t i0, std::int64_t i1 = 0, std::int64_t i2 = 0) const {
    return values_[offset(i0, i1, i2)];
  }

  std::span<const Complex> values() const { return values_; }
  /// Mutable access invalidates the halo until the next fill.
  std::span<Complex> mutable_values() {
    ++data_generation_;
    return values_;
  }

  void clear();
  void mark_halo_fresh() { halo_generation_ = data_generation_; }
  bool halo_fresh() const { return halo_generation_ == data_generation_; }

  /// Owned cells packed contiguously (x fastest).
  std::vector<Complex> owned_values() const;
  void set_owned_values(std::span<const Complex> packed);

 private:
  int dim_ = 0;
  int modes_ = 0;
  int fine_ = 0;
  double length_ = 0.0;
  int halo_ = 0;
  Box owned_;
  Index3 ext_{1, 1, 1};
  Index3 strides_{1, 1, 1};
  std::vector<Complex> values_;
  std::uint64_t data_generation_ = 0;
  std::uint64_t halo_generation_ = 0;
};

/// Per-axis stencil of one particle: covered indices [base, base + width)
/// (before periodic wrapping) and the window weight at each.
struct Stencil {
  int dim = 3;
  int width = 0;
  Index3 base{0, 0, 0};
  std::array<std::array<double, kMaxWidth>, 3> weights{};
};

/// Scaled coordinate x / h in [0, M). Rounding can push x just below L onto
/// M, which is the same periodic point as 0.
inline double fine_coordinate(double x, int fine, double length) {
  double u = x * (fine / length);
  return u >= fine ? u - fine : u;
}

/// base = ceil(u - w/2); weights[j] = phi((u - base - j) * 2 / w).
inline std::int64_t axis_stencil(double u, int width, double beta, double* weights) {
  const double scale = 2.0 / width;
  const auto base = static_cast<std::int64_t>(std::ceil(u - 0.5 * width));
  for (int j = 0; j < width; ++j) weights[j] = (u - static_cast<double>(base + j)) * scale;
  es_eval_inplace(weights, static_cast<std::size_t>(width), beta);
  return base;
}

Stencil stencil_for(const Vec3& x, const WindowSpec& spec, const OversampledGrid& grid);

/// Cell of a canonical position: floor(x / h) per active axis.
Index3 cell_of(const Vec3& x, int dim, int fine, double length);

std::int64_t wrap_index(std::int64_t i, std::int64_t m);

struct Tile {
  Box cells;
  Index3 hist_origin{0, 0, 0};
  Index3 hist_extent{1, 1, 1};
  std::size_t hist_volume() const {
    return static_cast<std::size_t>(hist_extent[0] * hist_extent[1] * hist_extent[2]);
  }
};

/// Partition of the owned box into tiles. Every tile carries the
/// halo-extended histogram box a particle inside it can touch, of extent
/// T_i + w on each active axis.
struct TileLayout {
  int dim = 3;
  int width = 0;
  int fine = 0;
  std::array<int, 3> tile_extent{1, 1, 1};
  int z_split = 1;
  Index3 counts{1, 1, 1};
  Box owned;
  std::vector<Tile> tiles;

  std::size_t tile_of_cell(const Index3& cell) const;
  /// Stencil offsets [begin, end) along z handled by slice s. Problems with
  /// fewer than three axes always use a single slice.
  std::pair<int, int> z_offsets(int slice) const;
};

inline constexpr std::array<int, 3> kDefaultTile{8, 8, 4};

TileLayout build_tiles(const OversampledGrid& grid, std::array<int, 3> tile_extent,
                       int z_split, int width);

/// Default z split: min(w, 4).
int default_z_split(int width);

/// Single-rank halo handling: add every halo cell into its periodic image and
/// zero the halo, or copy periodic images into the halo.
void fold_halo_periodic(OversampledGrid& grid);
void fill_halo_periodic(OversampledGrid& grid);

}  // namespace dnufft

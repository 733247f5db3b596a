#include "dnufft/decomp.hpp"

#include <chrono>
#include <exception>
#include <sstream>
#include <thread>

#include "dnufft/error.hpp"

namespace dnufft {

RankGrid parse_rank_grid(const std::string& text) {
  RankGrid grid;
  std::stringstream in(text);
  std::string item;
  int axis = 0;
  while (std::getline(in, item, ',')) {
    require(axis < 3, ErrorCode::ParseError, "rank grid has more than three entries: " + text);
    try {
      std::size_t used = 0;
      grid.dims[axis] = std::stoi(item, &used);
      require(used == item.size(), ErrorCode::ParseError, "bad rank grid entry '" + item + "'");
    } catch (const std::logic_error&) {
      fail(ErrorCode::ParseError, "bad rank grid entry '" + item + "'");
    }
    require(grid.dims[axis] >= 1, ErrorCode::ParseError, "rank counts must be >= 1");
    ++axis;
  }
  require(axis == 3, ErrorCode::ParseError, "rank grid needs three entries: " + text);
  return grid;
}

std::string to_string(const RankGrid& grid) {
  return std::to_string(grid.dims[0]) + "," + std::to_string(grid.dims[1]) + "," +
         std::to_string(grid.dims[2]);
}

DecompositionMap::DecompositionMap(int dim, int fine, RankGrid ranks, int width)
    : dim_(dim), fine_(fine), halo_((width + 1) / 2), width_(width), ranks_(ranks) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dim must be 1, 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      require(ranks.dims[a] == 1, ErrorCode::DecompositionInvalid,
              "inactive axes cannot be split across ranks");
      base_[a] = 1;
      continue;
    }
    require(ranks.dims[a] >= 1 && ranks.dims[a] <= fine, ErrorCode::DecompositionInvalid,
            "rank grid exceeds the fine grid");
    base_[a] = fine / ranks.dims[a];
    require(base_[a] >= halo_, ErrorCode::DecompositionInvalid,
            "rank boxes of extent " + std::to_string(base_[a]) +
                " are thinner than the halo width " + std::to_string(halo_));
  }
  info_.resize(static_cast<std::size_t>(ranks.count()));
  for (int c2 = 0; c2 < ranks.dims[2]; ++c2)
    for (int c1 = 0; c1 < ranks.dims[1]; ++c1)
      for (int c0 = 0; c0 < ranks.dims[0]; ++c0) {
        const Index3 c{c0, c1, c2};
        RankInfo& info = info_[static_cast<std::size_t>(rank_at(c))];
        info.rank = rank_at(c);
        info.coords = c;
        for (int a = 0; a < 3; ++a) {
          if (a >= dim) {
            info.owned.lo[a] = 0;
            info.owned.hi[a] = 1;
          } else {
            info.owned.lo[a] = c[a] * base_[a];
            info.owned.hi[a] = c[a] == ranks.dims[a] - 1 ? fine : (c[a] + 1) * base_[a];
          }
          Index3 lo = c;
          Index3 hi = c;
          lo[a] -= 1;
          hi[a] += 1;
          info.neighbors[a][0] = rank_at(lo);
          info.neighbors[a][1] = rank_at(hi);
        }
      }
}

int DecompositionMap::rank_at(Index3 coords) const {
  int r = 0;
  int mult = 1;
  for (int a = 0; a < 3; ++a) {
    const int p = ranks_.dims[a];
    const auto c = static_cast<int>(((coords[a] % p) + p) % p);
    r += c * mult;
    mult *= p;
  }
  return r;
}

int DecompositionMap::rank_of_cell(const Index3& cell) const {
  Index3 coords{0, 0, 0};
  for (int a = 0; a < dim_; ++a)
    coords[a] = std::min<std::int64_t>(cell[a] / base_[a], ranks_.dims[a] - 1);
  return rank_at(coords);
}

OversampledGrid DecompositionMap::make_grid(int r, int modes, double length) const {
  require(2 * modes == fine_, ErrorCode::InvalidArgument, "mode count does not match the map");
  return OversampledGrid(dim_, modes, length, halo_, rank(r).owned);
}

DecompositionMap partition(int dim, int fine, RankGrid ranks, int width) {
  return DecompositionMap(dim, fine, ranks, width);
}

Communicator::Communicator(int ranks) : ranks_(ranks) {
  require(ranks >= 1, ErrorCode::InvalidArgument, "communicator needs at least one rank");
}

void Communicator::send(HaloMessage message) {
  require(message.target >= 0 && message.target < ranks_ && message.source >= 0 &&
              message.source < ranks_,
          ErrorCode::MessageMismatch, "message addressed outside the communicator");
  const std::size_t expected =
      static_cast<std::size_t>(message.extent[0] * message.extent[1] * message.extent[2]);
  require(message.payload.size() == expected, ErrorCode::MessageMismatch,
          "halo payload does not match its extent");
  Key key{message.target, message.source, message.axis, static_cast<int>(message.side),
          static_cast<int>(message.direction)};
  {
    std::lock_guard lock(mutex_);
    counters_.messages += 1;
    counters_.bytes += message.payload.size() * sizeof(Complex);
    boxes_[key].push_back(std::move(message));
  }
  arrived_.notify_all();
}

HaloMessage Communicator::receive(int target, int source, int axis, Side side,
                                  HaloDirection direction) {
  Key key{target, source, axis, static_cast<int>(side), static_cast<int>(direction)};
  std::unique_lock lock(mutex_);
  const bool ok = arrived_.wait_for(lock, std::chrono::seconds(120), [&] {
    auto it = boxes_.find(key);
    return it != boxes_.end() && !it->second.empty();
  });
  require(ok, ErrorCode::MessageMismatch, "timed out waiting for a halo message");
  auto& box = boxes_[key];
  HaloMessage msg = std::move(box.front());
  box.pop_front();
  return msg;
}

TrafficCounters Communicator::counters() const {
  std::lock_guard lock(mutex_);
  return counters_;
}

void Communicator::reset_counters() {
  std::lock_guard lock(mutex_);
  counters_ = {};
}

void run_ranks(int ranks, const std::function<void(int)>& fn) {
  if (ranks == 1) {
    fn(0);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(ranks));
  {
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(ranks));
    for (int r = 0; r < ranks; ++r)
      workers.emplace_back([&, r] {
        try {
          fn(r);
        } catch (...) {
          errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

RankParticles assign_particles(const ParticleSet& ps, const DecompositionMap& map) {
  const auto nranks = static_cast<std::size_t>(map.size());
  RankParticles out;
  out.source_index.resize(nranks);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Index3 c = cell_of(ps.positions()[i], ps.dim(), map.fine(), ps.length());
    out.source_index[static_cast<std::size_t>(map.rank_of_cell(c))].push_back(i);
  }
  out.sets.reserve(nranks);
  for (std::size_t r = 0; r < nranks; ++r) out.sets.push_back(ps.subset(out.source_index[r]));
  return out;
}

namespace {

struct Region {
  Index3 lo;
  Index3 hi;
  Index3 extent() const { return {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]}; }
};

// Slab along `axis` spanning [lo, hi) there and the full stored range on the
// other axes.
Region slab(const OversampledGrid& grid, int axis, std::int64_t lo, std::int64_t hi) {
  Region r;
  r.lo = grid.storage_origin();
  for (int a = 0; a < 3; ++a) r.hi[a] = r.lo[a] + grid.extended_extent(a);
  r.lo[axis] = lo;
  r.hi[axis] = hi;
  return r;
}

std::vector<Complex> pack(const OversampledGrid& grid, const Region& r) {
  std::vector<Complex> out;
  const auto e = r.extent();
  out.reserve(static_cast<std::size_t>(e[0] * e[1] * e[2]));
  const auto v = grid.values();
  for (auto i2 = r.lo[2]; i2 < r.hi[2]; ++i2)
    for (auto i1 = r.lo[1]; i1 < r.hi[1]; ++i1) {
      const std::size_t row = grid.offset(r.lo[0], i1, i2);
      out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(row),
                 v.begin() + static_cast<std::ptrdiff_t>(row + e[0]));
    }
  return out;
}

template <typename Op>
void unpack(std::span<Complex> v, const OversampledGrid& grid, const Region& r,
            const HaloMessage& msg, Op op) {
  require(msg.extent == r.extent(), ErrorCode::MessageMismatch,
          "halo message extent does not match the receiving slab");
  std::size_t k = 0;
  for (auto i2 = r.lo[2]; i2 < r.hi[2]; ++i2)
    for (auto i1 = r.lo[1]; i1 < r.hi[1]; ++i1) {
      const std::size_t row = grid.offset(r.lo[0], i1, i2);
      for (std::int64_t i0 = 0; i0 < r.hi[0] - r.lo[0]; ++i0) op(v[row + i0], msg.payload[k++]);
    }
}

void zero(std::span<Complex> v, const OversampledGrid& grid, const Region& r) {
  for (auto i2 = r.lo[2]; i2 < r.hi[2]; ++i2)
    for (auto i1 = r.lo[1]; i1 < r.hi[1]; ++i1) {
      const std::size_t row = grid.offset(r.lo[0], i1, i2);
      for (std::int64_t i0 = 0; i0 < r.hi[0] - r.lo[0]; ++i0) v[row + i0] = Complex{};
    }
}

HaloMessage make_message(const OversampledGrid& grid, const Region& r, int source, int target,
                         int axis, Side side, HaloDirection dir) {
  HaloMessage msg;
  msg.source = source;
  msg.target = target;
  msg.axis = axis;
  msg.side = side;
  msg.direction = dir;
  msg.extent = r.extent();
  msg.payload = pack(grid, r);
  return msg;
}

void check_grid(const OversampledGrid& grid, int rank, const DecompositionMap& map) {
  require(grid.owned() == map.rank(rank).owned && grid.halo() == map.halo() &&
              grid.dim() == map.dim(),
          ErrorCode::MessageMismatch, "grid does not match its rank in the decomposition");
}

}  // namespace

void halo_accumulate_rank(OversampledGrid& grid, int rank, const DecompositionMap& map,
                          Communicator& comm) {
  check_grid(grid, rank, map);
  const int h = map.halo();
  const auto& info = map.rank(rank);
  auto v = grid.mutable_values();
  if (h == 0) return;
  for (int axis = 0; axis < map.dim(); ++axis) {
    const auto lo = info.owned.lo[axis];
    const auto hi = info.owned.hi[axis];
    const int low_nb = info.neighbors[axis][0];
    const int high_nb = info.neighbors[axis][1];
    const Region low_halo = slab(grid, axis, lo - h, lo);
    const Region high_halo = slab(grid, axis, hi, hi + h);
    comm.send(make_message(grid, low_halo, rank, low_nb, axis, Side::Low, HaloDirection::Accumulate));
    comm.send(make_message(grid, high_halo, rank, high_nb, axis, Side::High, HaloDirection::Accumulate));
    zero(v, grid, low_halo);
    zero(v, grid, high_halo);
    // The high neighbor's low halo aliases our top owned cells and vice versa.
    auto from_high = comm.receive(rank, high_nb, axis, Side::Low, HaloDirection::Accumulate);
    unpack(v, grid, slab(grid, axis, hi - h, hi), from_high, [](Complex& d, Complex s) { d += s; });
    auto from_low = comm.receive(rank, low_nb, axis, Side::High, HaloDirection::Accumulate);
    unpack(v, grid, slab(grid, axis, lo, lo + h), from_low, [](Complex& d, Complex s) { d += s; });
  }
}

void halo_fill_rank(OversampledGrid& grid, int rank, const DecompositionMap& map,
                    Communicator& comm) {
  check_grid(grid, rank, map);
  const int h = map.halo();
  const auto& info = map.rank(rank);
  if (h > 0) {
    auto v = grid.mutable_values();
    for (int axis = 0; axis < map.dim(); ++axis) {
      const auto lo = info.owned.lo[axis];
      const auto hi = info.owned.hi[axis];
      const int low_nb = info.neighbors[axis][0];
      const int high_nb = info.neighbors[axis][1];
      comm.send(make_message(grid, slab(grid, axis, lo, lo + h), rank, low_nb, axis, Side::Low,
                             HaloDirection::Fill));
      comm.send(make_message(grid, slab(grid, axis, hi - h, hi), rank, high_nb, axis, Side::High,
                             HaloDirection::Fill));
      auto from_high = comm.receive(rank, high_nb, axis, Side::Low, HaloDirection::Fill);
      unpack(v, grid, slab(grid, axis, hi, hi + h), from_high, [](Complex& d, Complex s) { d = s; });
      auto from_low = comm.receive(rank, low_nb, axis, Side::High, HaloDirection::Fill);
      unpack(v, grid, slab(grid, axis, lo - h, lo), from_low, [](Complex& d, Complex s) { d = s; });
    }
  }
  grid.mark_halo_fresh();
}

void halo_accumulate(std::vector<OversampledGrid>& grids, const DecompositionMap& map,
                     Communicator& comm) {
  require(static_cast<int>(grids.size()) == map.size(), ErrorCode::MessageMismatch,
          "one grid per rank required");
  run_ranks(map.size(), [&](int r) {
    halo_accumulate_rank(grids[static_cast<std::size_t>(r)], r, map, comm);
  });
}

void halo_fill(std::vector<OversampledGrid>& grids, const DecompositionMap& map,
               Communicator& comm) {
  require(static_cast<int>(grids.size()) == map.size(), ErrorCode::MessageMismatch,
          "one grid per rank required");
  run_ranks(map.size(), [&](int r) { halo_fill_rank(grids[static_cast<std::size_t>(r)], r, map, comm); });
}

std::vector<Complex> gather_owned(const std::vector<OversampledGrid>& grids,
                                  const DecompositionMap& map) {
  const auto m = static_cast<std::size_t>(map.fine());
  std::size_t total = 1;
  for (int a = 0; a < map.dim(); ++a) total *= m;
  std::vector<Complex> global(total);
  for (int r = 0; r < map.size(); ++r) {
    const auto& g = grids[static_cast<std::size_t>(r)];
    const Box& b = g.owned();
    for (auto i2 = b.lo[2]; i2 < b.hi[2]; ++i2)
      for (auto i1 = b.lo[1]; i1 < b.hi[1]; ++i1) {
        const auto src = g.values().begin() + static_cast<std::ptrdiff_t>(g.offset(b.lo[0], i1, i2));
        const auto dst = static_cast<std::size_t>(b.lo[0]) +
                         m * (static_cast<std::size_t>(i1) + m * static_cast<std::size_t>(i2));
        std::copy(src, src + b.extent(0), global.begin() + static_cast<std::ptrdiff_t>(dst));
      }
  }
  return global;
}

void scatter_owned(std::span<const Complex> global, std::vector<OversampledGrid>& grids,
                   const DecompositionMap& map) {
  const auto m = static_cast<std::size_t>(map.fine());
  for (int r = 0; r < map.size(); ++r) {
    auto& g = grids[static_cast<std::size_t>(r)];
    const Box& b = g.owned();
    auto v = g.mutable_values();
    for (auto i2 = b.lo[2]; i2 < b.hi[2]; ++i2)
      for (auto i1 = b.lo[1]; i1 < b.hi[1]; ++i1) {
        const auto src = static_cast<std::size_t>(b.lo[0]) +
                         m * (static_cast<std::size_t>(i1) + m * static_cast<std::size_t>(i2));
        std::copy(global.begin() + static_cast<std::ptrdiff_t>(src),
                  global.begin() + static_cast<std::ptrdiff_t>(src + b.extent(0)),
                  v.begin() + static_cast<std::ptrdiff_t>(g.offset(b.lo[0], i1, i2)));
      }
  }
}

}  // namespace dnufft

#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "dnufft/geometry.hpp"
#include "dnufft/points.hpp"

namespace dnufft {

/// Number of ranks along each axis.
struct RankGrid {
  std::array<int, 3> dims{1, 1, 1};

  int count() const { return dims[0] * dims[1] * dims[2]; }
  bool operator==(const RankGrid&) const = default;
};

/// Parses "P1,P2,P3".
RankGrid parse_rank_grid(const std::string& text);
std::string to_string(const RankGrid& grid);

enum class Side { Low = 0, High = 1 };
enum class HaloDirection { Fill, Accumulate };

struct RankInfo {
  int rank = 0;
  Index3 coords{0, 0, 0};
  Box owned;
  /// neighbors[axis][side], periodic; may be the rank itself.
  std::array<std::array<int, 2>, 3> neighbors{};
};

/// Equal boxes of extent M / P_i per axis (the last rank on an axis takes any
/// remainder), with a periodic neighbor table and halo width ceil(w/2).
class DecompositionMap {
 public:
  DecompositionMap() = default;
  DecompositionMap(int dim, int fine, RankGrid ranks, int width);

  int dim() const { return dim_; }
  int fine() const { return fine_; }
  int halo() const { return halo_; }
  int width() const { return width_; }
  const RankGrid& rank_grid() const { return ranks_; }
  int size() const { return static_cast<int>(info_.size()); }
  const RankInfo& rank(int r) const { return info_[static_cast<std::size_t>(r)]; }

  int rank_at(Index3 coords) const;
  int rank_of_cell(const Index3& cell) const;

  /// Zeroed grid shaped for rank r.
  OversampledGrid make_grid(int r, int modes, double length) const;

 private:
  int dim_ = 3;
  int fine_ = 0;
  int halo_ = 0;
  int width_ = 0;
  RankGrid ranks_;
  std::array<std::int64_t, 3> base_{1, 1, 1};
  std::vector<RankInfo> info_;
};

DecompositionMap partition(int dim, int fine, RankGrid ranks, int width);

/// Slab of halo data travelling between two ranks.
struct HaloMessage {
  int source = 0;
  int target = 0;
  int axis = 0;
  Side side = Side::Low;  // face of the source the slab belongs to
  HaloDirection direction = HaloDirection::Fill;
  Index3 extent{0, 0, 0};
  std::vector<Complex> payload;
};

struct TrafficCounters {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
};

/// In-process mailbox standing in for a message-passing runtime. Sends never
/// block; receives block until the matching message arrives.
class Communicator {
 public:
  explicit Communicator(int ranks);

  int size() const { return ranks_; }
  void send(HaloMessage message);
  HaloMessage receive(int target, int source, int axis, Side side, HaloDirection direction);

  TrafficCounters counters() const;
  void reset_counters();

 private:
  using Key = std::tuple<int, int, int, int, int>;
  int ranks_;
  mutable std::mutex mutex_;
  std::condition_variable arrived_;
  std::map<Key, std::deque<HaloMessage>> boxes_;
  TrafficCounters counters_;
};

/// Runs fn(rank) for every rank on its own thread and rethrows the first
/// failure after all ranks finish.
void run_ranks(int ranks, const std::function<void(int)>& fn);

struct RankParticles {
  std::vector<ParticleSet> sets;
  /// source_index[r][i] is the index in the input of particle i on rank r.
  std::vector<std::vector<std::size_t>> source_index;
};

/// Each particle goes to the rank whose half-open owned box holds its cell.
RankParticles assign_particles(const ParticleSet& ps, const DecompositionMap& map);

/// Adds every halo cell into the owned cell it aliases on the neighboring
/// rank (periodically) and zeroes the halo. Sweeps x, y, z with face
/// messages, which carries edge and corner contributions along.
void halo_accumulate(std::vector<OversampledGrid>& grids, const DecompositionMap& map,
                     Communicator& comm);

/// Copies neighbor-owned values into every halo cell and marks the grids
/// fresh for interpolation.
void halo_fill(std::vector<OversampledGrid>& grids, const DecompositionMap& map,
               Communicator& comm);

/// Per-rank halo exchange steps, for callers that already run one thread per
/// rank.
void halo_accumulate_rank(OversampledGrid& grid, int rank, const DecompositionMap& map,
                          Communicator& comm);
void halo_fill_rank(OversampledGrid& grid, int rank, const DecompositionMap& map,
                    Communicator& comm);

/// Packs owned boxes of all ranks into one global M^d array and back.
std::vector<Complex> gather_owned(const std::vector<OversampledGrid>& grids,
                                  const DecompositionMap& map);
void scatter_owned(std::span<const Complex> global, std::vector<OversampledGrid>& grids,
                   const DecompositionMap& map);

}  // namespace dnufft

#include "dnufft/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "dnufft/error.hpp"

namespace dnufft {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Accumulates elapsed time into one StageTimes slot when timing is on.
class StageTimer {
 public:
  StageTimer(StageTimes* times, double StageTimes::*slot)
      : times_(times), slot_(slot), start_(Clock::now()) {}
  ~StageTimer() {
    if (times_ != nullptr) times_->*slot_ += seconds_since(start_);
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  StageTimes* times_;
  double StageTimes::*slot_;
  Clock::time_point start_;
};

Execution rank_execution(const Execution& exec, int ranks) {
  Execution out = exec;
  if (!exec.deterministic) out.threads = std::max(1, exec.resolved_threads() / ranks);
  return out;
}

}  // namespace

const char* to_string(FftStrategy strategy) noexcept {
  return strategy == FftStrategy::Pruned ? "pruned" : "full";
}

FftStrategy parse_fft_strategy(const std::string& name) {
  if (name == "full") return FftStrategy::Full;
  if (name == "pruned") return FftStrategy::Pruned;
  fail(ErrorCode::ParseError, "unknown FFT strategy '" + name + "'");
}

struct NufftPlan::Backend {
  std::optional<FftPlan> forward;
  std::optional<FftPlan> inverse;
  std::optional<PrunedPlan> pruned;
  std::optional<DecompositionMap> map;
  std::atomic<std::uint64_t> messages{0};
  std::atomic<std::uint64_t> bytes{0};
};

NufftPlan::NufftPlan(int dim, int modes, double length, double eps, PlanOptions options)
    : NufftPlan(dim, modes, length, select_params(eps, dim), std::move(options)) {}

NufftPlan::NufftPlan(int dim, int modes, double length, const WindowSpec& window,
                     PlanOptions options)
    : dim_(dim), modes_(modes), length_(length), window_(window), options_(std::move(options)) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dim must be 1, 2 or 3");
  require(modes >= 2 && modes % 2 == 0, ErrorCode::InvalidArgument,
          "mode count must be even and >= 2");
  require(std::isfinite(length) && length > 0.0, ErrorCode::InvalidArgument,
          "domain length must be positive");
  require(window_.dim == dim, ErrorCode::WidthMismatch, "window built for another dimension");
  require(options_.n_conc >= 1, ErrorCode::InvalidArgument, "n_conc must be >= 1");
  deconv_ = build_deconv_table(window_, modes_, fine(), length_);

  backend_ = std::make_unique<Backend>();
  if (options_.fft == FftStrategy::Pruned) {
    backend_->pruned.emplace(dim_, fine(), modes_, options_.n_conc);
  } else {
    backend_->forward.emplace(dim_, fine(), FftDirection::Forward);
    backend_->inverse.emplace(dim_, fine(), FftDirection::Inverse);
  }
  if (options_.ranks) {
    for (int a = dim_; a < 3; ++a)
      require(options_.ranks->dims[a] == 1, ErrorCode::DecompositionInvalid,
              "inactive axes cannot be split");
    backend_->map.emplace(partition(dim_, fine(), *options_.ranks, window_.width));
  }
}

NufftPlan::~NufftPlan() = default;
NufftPlan::NufftPlan(NufftPlan&&) noexcept = default;
NufftPlan& NufftPlan::operator=(NufftPlan&&) noexcept = default;

const DecompositionMap* NufftPlan::decomposition() const {
  return backend_->map ? &*backend_->map : nullptr;
}

TrafficCounters NufftPlan::traffic() const {
  return {backend_->messages.load(), backend_->bytes.load()};
}

void NufftPlan::apply_deconv(ModeArray& modes) const {
  const auto& d = deconv_.axis();
  const int n = modes_;
  const int n1 = dim_ >= 2 ? n : 1;
  const int n2 = dim_ >= 3 ? n : 1;
  auto values = modes.values();
  std::size_t idx = 0;
  for (int k = 0; k < n2; ++k) {
    const double dz = dim_ >= 3 ? d[static_cast<std::size_t>(k)] : 1.0;
    for (int j = 0; j < n1; ++j) {
      const double dyz = dz * (dim_ >= 2 ? d[static_cast<std::size_t>(j)] : 1.0);
      for (int i = 0; i < n; ++i) values[idx++] *= dyz * d[static_cast<std::size_t>(i)];
    }
  }
}

void NufftPlan::forward_band(std::vector<Complex> fine_values, ModeArray& out) const {
  if (backend_->pruned) {
    out = backend_->pruned->forward(fine_values);
  } else {
    backend_->forward->execute_inplace(fine_values);
    out = truncate_modes(fine_values, dim_, fine(), modes_);
  }
}

std::vector<Complex> NufftPlan::inverse_band(const ModeArray& modes) const {
  if (backend_->pruned) return backend_->pruned->inverse(modes);
  auto spectrum = pad_modes(modes, fine());
  backend_->inverse->execute_inplace(spectrum);
  return spectrum;
}

ModeArray NufftPlan::type1(const ParticleSet& ps, StageTimes* times) const {
  require(ps.dim() == dim_, ErrorCode::InvalidArgument, "particle dimension mismatch");
  require(std::abs(ps.length() - length_) <= 1e-12 * length_, ErrorCode::InvalidArgument,
          "particle domain length differs from the plan");
  if (times != nullptr) *times = {};
  const auto start = Clock::now();
  const int halo = window_.halo_width();
  std::vector<Complex> fine_values;

  if (!backend_->map) {
    auto grid = OversampledGrid::global(dim_, modes_, length_, halo);
    {
      StageTimer t(times, &StageTimes::spread_interp);
      spread_into_halo(ps, window_, grid, options_.spread, options_.exec);
    }
    {
      StageTimer t(times, &StageTimes::halo);
      fold_halo_periodic(grid);
    }
    StageTimer t(times, &StageTimes::fft);
    fine_values = grid.owned_values();
  } else {
    const auto& map = *backend_->map;
    const int ranks = map.size();
    RankParticles parts;
    std::vector<OversampledGrid> grids;
    {
      StageTimer t(times, &StageTimes::spread_interp);
      parts = assign_particles(ps, map);
      grids.reserve(static_cast<std::size_t>(ranks));
      for (int r = 0; r < ranks; ++r) grids.push_back(map.make_grid(r, modes_, length_));
      const auto exec = rank_execution(options_.exec, ranks);
      run_ranks(ranks, [&](int r) {
        spread_into_halo(parts.sets[static_cast<std::size_t>(r)], window_,
                         grids[static_cast<std::size_t>(r)], options_.spread, exec);
      });
    }
    {
      StageTimer t(times, &StageTimes::halo);
      Communicator comm(ranks);
      halo_accumulate(grids, map, comm);
      const auto c = comm.counters();
      backend_->messages += c.messages;
      backend_->bytes += c.bytes;
    }
    StageTimer t(times, &StageTimes::fft);
    fine_values = gather_owned(grids, map);
  }

  ModeArray out;
  {
    StageTimer t(times, &StageTimes::fft);
    forward_band(std::move(fine_values), out);
  }
  {
    StageTimer t(times, &StageTimes::deconv);
    apply_deconv(out);
  }
  if (times != nullptr) times->total = seconds_since(start);
  return out;
}

std::vector<Complex> NufftPlan::type2(const ModeArray& modes, const ParticleSet& positions,
                                      StageTimes* times) const {
  auto out = type2_many(std::span<const ModeArray>(&modes, 1), positions, times);
  return std::move(out.front());
}

std::vector<std::vector<Complex>> NufftPlan::type2_many(std::span<const ModeArray> modes,
                                                        const ParticleSet& positions,
                                                        StageTimes* times) const {
  require(!modes.empty(), ErrorCode::InvalidArgument, "no mode arrays given");
  require(positions.dim() == dim_, ErrorCode::InvalidArgument, "particle dimension mismatch");
  require(std::abs(positions.length() - length_) <= 1e-12 * length_,
          ErrorCode::InvalidArgument, "particle domain length differs from the plan");
  for (const auto& m : modes)
    require(m.dim() == dim_ && m.modes() == modes_, ErrorCode::InvalidArgument,
            "mode array shape differs from the plan");
  if (times != nullptr) *times = {};
  const auto start = Clock::now();
  const int halo = window_.halo_width();
  const std::size_t fields = modes.size();

  std::vector<std::vector<Complex>> fine_values(fields);
  for (std::size_t f = 0; f < fields; ++f) {
    ModeArray corrected = modes[f];
    {
      StageTimer t(times, &StageTimes::deconv);
      apply_deconv(corrected);
    }
    StageTimer t(times, &StageTimes::fft);
    fine_values[f] = inverse_band(corrected);
  }

  std::vector<std::vector<Complex>> out;
  if (!backend_->map) {
    std::vector<OversampledGrid> grids;
    grids.reserve(fields);
    {
      StageTimer t(times, &StageTimes::fft);
      for (std::size_t f = 0; f < fields; ++f) {
        grids.push_back(OversampledGrid::global(dim_, modes_, length_, halo));
        grids.back().set_owned_values(fine_values[f]);
      }
    }
    {
      StageTimer t(times, &StageTimes::halo);
      for (auto& g : grids) fill_halo_periodic(g);
    }
    StageTimer t(times, &StageTimes::spread_interp);
    std::vector<const OversampledGrid*> ptrs;
    for (const auto& g : grids) ptrs.push_back(&g);
    out = interpolate_many(ptrs, positions, window_, options_.interp, options_.exec,
                           options_.spread.tile);
  } else {
    const auto& map = *backend_->map;
    const int ranks = map.size();
    const auto rsz = static_cast<std::size_t>(ranks);
    std::vector<std::vector<OversampledGrid>> grids(fields);
    {
      StageTimer t(times, &StageTimes::fft);
      for (std::size_t f = 0; f < fields; ++f) {
        grids[f].reserve(rsz);
        for (int r = 0; r < ranks; ++r) grids[f].push_back(map.make_grid(r, modes_, length_));
        scatter_owned(fine_values[f], grids[f], map);
      }
    }
    {
      StageTimer t(times, &StageTimes::halo);
      Communicator comm(ranks);
      for (auto& g : grids) halo_fill(g, map, comm);
      const auto c = comm.counters();
      backend_->messages += c.messages;
      backend_->bytes += c.bytes;
    }
    StageTimer t(times, &StageTimes::spread_interp);
    const auto parts = assign_particles(positions, map);
    const auto exec = rank_execution(options_.exec, ranks);
    std::vector<std::vector<std::vector<Complex>>> local(rsz);
    run_ranks(ranks, [&](int r) {
      const auto ri = static_cast<std::size_t>(r);
      std::vector<const OversampledGrid*> ptrs;
      for (std::size_t f = 0; f < fields; ++f) ptrs.push_back(&grids[f][ri]);
      local[ri] = interpolate_many(ptrs, parts.sets[ri], window_, options_.interp, exec,
                                   options_.spread.tile);
    });
    out.assign(fields, std::vector<Complex>(positions.size()));
    for (std::size_t r = 0; r < rsz; ++r)
      for (std::size_t f = 0; f < fields; ++f)
        for (std::size_t i = 0; i < parts.source_index[r].size(); ++i)
          out[f][parts.source_index[r][i]] = local[r][f][i];
  }
  if (times != nullptr) times->total = seconds_since(start);
  return out;
}

StageTimes timing_breakdown(const NufftPlan& plan, const ParticleSet& ps) {
  StageTimes times;
  plan.type1(ps, &times);
  return times;
}

StageTimes timing_breakdown(const NufftPlan& plan, const ModeArray& modes,
                            const ParticleSet& positions) {
  StageTimes times;
  plan.type2(modes, positions, &times);
  return times;
}

}  // namespace dnufft

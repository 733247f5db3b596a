#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnufft/decomp.hpp"
#include "dnufft/fft_backend.hpp"
#include "dnufft/interp.hpp"
#include "dnufft/specfft.hpp"
#include "dnufft/spread.hpp"
#include "dnufft/window.hpp"

namespace dnufft {

enum class FftStrategy { Full, Pruned };

const char* to_string(FftStrategy strategy) noexcept;
FftStrategy parse_fft_strategy(const std::string& name);

struct PlanOptions {
  SpreadVariant spread;
  InterpOrdering interp = InterpOrdering::Direct;
  FftStrategy fft = FftStrategy::Full;
  int n_conc = 4;
  /// Simulated rank grid; unset runs on one periodic grid.
  std::optional<RankGrid> ranks;
  Execution exec;
};

/// Wall-clock seconds per pipeline stage of the last call that asked for them.
struct StageTimes {
  double spread_interp = 0.0;
  double fft = 0.0;
  double deconv = 0.0;
  double halo = 0.0;
  double total = 0.0;

  double stage_sum() const { return spread_interp + fft + deconv + halo; }
};

/// Type 1 and Type 2 NUFFT on [0, L)^d with N retained modes per axis and a
/// fine grid of M = 2N. All precomputation (window, deconvolution table, FFT
/// plans, decomposition) happens here; execute calls only allocate grids.
///
///   type1 = D chi F C      (spread, FFT, keep the retained band, deconvolve)
///   type2 = C^T F^-1 chi^T D
///
/// so that type1(f)_k ~ sum_j f_j exp(-i k x_j) and
/// type2(c)_j ~ sum_k c_k exp(+i k x_j), with k = 2 pi n / L.
class NufftPlan {
 public:
  NufftPlan(int dim, int modes, double length, double eps, PlanOptions options = {});
  NufftPlan(int dim, int modes, double length, const WindowSpec& window,
            PlanOptions options = {});
  ~NufftPlan();
  NufftPlan(NufftPlan&&) noexcept;
  NufftPlan& operator=(NufftPlan&&) noexcept;

  int dim() const { return dim_; }
  int modes() const { return modes_; }
  int fine() const { return 2 * modes_; }
  double length() const { return length_; }
  const WindowSpec& window() const { return window_; }
  const DeconvTable& deconv() const { return deconv_; }
  const PlanOptions& options() const { return options_; }
  const DecompositionMap* decomposition() const;

  ModeArray type1(const ParticleSet& ps, StageTimes* times = nullptr) const;
  std::vector<Complex> type2(const ModeArray& modes, const ParticleSet& positions,
                             StageTimes* times = nullptr) const;
  /// Several Type 2 transforms at the same positions; the interpolation of
  /// all fields shares one pass over the stencils.
  std::vector<std::vector<Complex>> type2_many(std::span<const ModeArray> modes,
                                               const ParticleSet& positions,
                                               StageTimes* times = nullptr) const;

  /// Halo traffic of decomposed runs since construction.
  TrafficCounters traffic() const;

 private:
  void apply_deconv(ModeArray& modes) const;
  void forward_band(std::vector<Complex> fine_values, ModeArray& out) const;
  std::vector<Complex> inverse_band(const ModeArray& modes) const;

  int dim_;
  int modes_;
  double length_;
  WindowSpec window_;
  PlanOptions options_;
  DeconvTable deconv_;
  struct Backend;
  std::unique_ptr<Backend> backend_;
};

/// Type 1 with per-stage timings.
StageTimes timing_breakdown(const NufftPlan& plan, const ParticleSet& ps);
/// Type 2 with per-stage timings.
StageTimes timing_breakdown(const NufftPlan& plan, const ModeArray& modes,
                            const ParticleSet& positions);

}  // namespace dnufft

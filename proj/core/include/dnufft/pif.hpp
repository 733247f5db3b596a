#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnufft/pipeline.hpp"

namespace dnufft {

/// How initial particles are drawn. Random uses a seeded pseudo-random
/// stream; Quiet uses a seed-shifted six-dimensional Halton sequence, which
/// lowers the sampling noise of the low Fourier modes by orders of magnitude.
enum class SamplingMode { Random, Quiet };

const char* to_string(SamplingMode mode) noexcept;
SamplingMode parse_sampling_mode(const std::string& name);

/// Electrostatic 3D-3V Landau damping run in plasma units (unit plasma
/// frequency, electrons with q/m = -1 on a neutralizing background).
struct PifConfig {
  int modes = 32;
  double density = 8.0;  // particles per retained mode
  double alpha = 0.05;
  double k = 0.5;
  double eps = 1e-4;
  double dt = 0.01;
  int steps = 2000;
  std::uint64_t seed = 1;
  SamplingMode sampling = SamplingMode::Quiet;
  /// Steps between Morton reorderings of the particle arrays; 0 never sorts.
  int sort_interval = 20;
  PlanOptions plan;

  double length() const;
  std::size_t particles() const;
  void validate() const;
};

struct PlasmaState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  double charge = 0.0;  // per particle, so that the total is -L^3
  double length = 0.0;
  ModeArray rho_k;
  std::array<ModeArray, 3> e_k;
  double t = 0.0;
  double dt = 0.0;
  int step = 0;
};

struct StepDiagnostics {
  int step = 0;
  double t = 0.0;
  double field_energy = 0.0;
  /// Field energy in the six modes n = (+-1, 0, 0), (0, +-1, 0), (0, 0, +-1).
  double mode_energy = 0.0;
  double kinetic_energy = 0.0;
  Vec3 momentum{0.0, 0.0, 0.0};
  double t_scatter = 0.0;
  double t_solve = 0.0;
  double t_gather = 0.0;
  double t_push = 0.0;
};

/// Position in [0, L) with CDF (x + (alpha/k) sin(kx)) / L equal to u,
/// i.e. density proportional to 1 + alpha cos(kx); Newton iteration.
double sample_perturbed_position(double u, double alpha, double k);

/// Particles with per-axis density 1 + alpha cos(k x_i) and standard normal
/// velocities; deterministic in `seed`.
PlasmaState sample_initial(std::size_t count, double alpha, double k, std::uint64_t seed,
                           SamplingMode mode = SamplingMode::Quiet);

/// Particle-in-Fourier loop: charge deposit by Type 1, spectral Poisson
/// solve, field gather by Type 2, kick-drift-kick leapfrog.
class PifSimulation {
 public:
  explicit PifSimulation(PifConfig config);
  PifSimulation(PifConfig config, PlasmaState initial);

  const PifConfig& config() const { return config_; }
  const PlasmaState& state() const { return state_; }
  const NufftPlan& plan() const { return plan_; }

  /// Diagnostics of the current state (fields are computed if needed).
  StepDiagnostics diagnose();
  /// Advances one step and returns the diagnostics after it.
  StepDiagnostics step();
  /// Records the initial state, then runs config().steps steps.
  std::vector<StepDiagnostics> run();

  /// Sum of the particle charges.
  double total_charge() const;

 private:
  void compute_field();
  void sort_particles();
  double field_energy() const;
  double mode_energy() const;
  double kinetic_energy() const;
  Vec3 momentum() const;

  PifConfig config_;
  NufftPlan plan_;
  PlasmaState state_;
  std::vector<Vec3> field_;
  bool field_valid_ = false;
  double t_scatter_ = 0.0;
  double t_solve_ = 0.0;
  double t_gather_ = 0.0;
};

/// Energy series a damping fit runs on.
enum class EnergySeries { Mode, Total };

/// Exponential fit to the local maxima of the field energy.
struct DampingFit {
  double gamma = 0.0;         // amplitude rate: half the energy slope
  double gamma_stderr = 0.0;  // standard error of gamma
  std::vector<double> peak_times;
  std::vector<double> peak_energies;
};

/// Least squares on log(energy) at its local maxima with t in [t_min, t_max].
/// Needs at least three peaks.
DampingFit fit_damping(std::span<const StepDiagnostics> series, double t_min = 0.0,
                       double t_max = 20.0, EnergySeries energy = EnergySeries::Mode);

/// Reads "key = value" settings: modes, density, alpha, k, eps, dt, steps,
/// seed, sampling, sort_interval, variant, interp, fft, nconc, ranks, threads. Unknown
/// keys are errors.
PifConfig parse_pif_config(std::istream& in, PifConfig base = {});
PifConfig load_pif_config(const std::string& path, PifConfig base = {});
/// Applies one setting to a config.
void set_pif_option(PifConfig& config, const std::string& key, const std::string& value);

inline constexpr const char* kPifCsvHeader =
    "step,t,field_energy,mode_energy,kinetic_energy,momentum_x,momentum_y,momentum_z,t_scatter,t_solve,"
    "t_gather,t_push";

void write_diagnostics_csv(std::ostream& out, std::span<const StepDiagnostics> series,
                           bool header = true);
void write_diagnostics_row(std::ostream& out, const StepDiagnostics& d);

}  // namespace dnufft

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dnufft/bench.hpp"
#include "dnufft/pif.hpp"
#include "dnufft/pipeline.hpp"
#include "dnufft/tuning.hpp"
#include "dnufft_cli/table.hpp"

namespace dnufft::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;

/// Schema identifiers; bump the suffix whenever a column list changes.
inline constexpr const char* kAccuracySchema = "accuracy/1";
inline constexpr const char* kBenchSchema = "bench/1";
inline constexpr const char* kPifSchema = "pif/1";
inline constexpr const char* kPifTimingSchema = "pif-timing/1";
inline constexpr const char* kVerifySchema = "verify/1";
inline constexpr const char* kTuneSchema = "tune/1";

const std::vector<std::string>& accuracy_columns();
const std::vector<std::string>& bench_columns();
const std::vector<std::string>& pif_columns();
const std::vector<std::string>& pif_timing_columns();
const std::vector<std::string>& verify_columns();
const std::vector<std::string>& tune_columns();

/// Flags shared by every subcommand, already parsed.
struct CommonOptions {
  int dim = 3;
  std::vector<int> types{1};
  int modes = 16;
  std::vector<double> densities{1.0};
  std::vector<double> eps{1e-2, 1e-4, 1e-6, 1e-8};
  std::vector<SpreadAlgorithm> variants{SpreadAlgorithm::Atomic};
  std::vector<InterpOrdering> orderings{InterpOrdering::Direct};
  std::vector<FftStrategy> ffts{FftStrategy::Full};
  int n_conc = 4;
  std::optional<RankGrid> ranks;
  std::uint64_t seed = 1;
  int threads = 0;
  bool deterministic = false;
  double length = 6.283185307179586;
  std::optional<TuningTable> tuning;
  /// Optional particle file (CSV with header, or raw binary for *.bin).
  std::string particles;

  Execution execution() const;
  PlanOptions plan_options(SpreadAlgorithm variant, InterpOrdering ordering, FftStrategy fft,
                           int width) const;
};

/// Test seams for the timing commands.
struct Hooks {
  BenchClock clock = steady_seconds;
  /// Called once per execution of the measured body.
  std::function<void()> on_execute;
};

struct CommandResult {
  Table table;
  int status = kExitOk;
  std::vector<std::string> notes;  // human-readable summary lines for stderr
};

/// Type 1/2 against the direct sums for every eps; max_rel_err is
/// max|result - exact| / max|exact|. Status 3 if any error exceeds 10 eps.
CommandResult cmd_accuracy(const CommonOptions& options);

struct BenchOptions {
  CommonOptions common;
  BenchProtocol protocol;
};
/// Warm-up + timed runs per configuration (type x density x eps x variant x
/// ordering x fft). Reports the median and range of the total time plus
/// per-stage medians and halo traffic.
CommandResult cmd_bench(const BenchOptions& options, const Hooks& hooks = {});

struct PifOptions {
  PifConfig config;
  /// Run 3 warm-up + 10 timed steps and report step timings instead of the
  /// diagnostics series.
  bool timing = false;
  /// Append a damping fit summary to the notes.
  bool fit = false;
};
CommandResult cmd_pif(const PifOptions& options, const Hooks& hooks = {});

/// Oracle self-checks on a small instance: Type 1/2 accuracy and the
/// adjoint identity. Status 3 on any failure.
CommandResult cmd_verify(const CommonOptions& options);

struct TuneOptions {
  CommonOptions common;
  BenchProtocol protocol{1, 3};
};
/// Exhaustive sweep of tile/team/z_split for the tiled and grid-parallel
/// spreads at each eps. The table holds every candidate; `best` receives the
/// fastest per width.
CommandResult cmd_tune(const TuneOptions& options, TuningTable& best, const Hooks& hooks = {});

/// Seeded uniform particles with complex strengths in [-1/2, 1/2]^2.
ParticleSet random_particles(int dim, double length, std::size_t count, std::uint64_t seed);
/// Seeded mode array with entries in [-1/2, 1/2]^2.
ModeArray random_modes(int dim, int modes, std::uint64_t seed);

/// Particle count for density rho: round(rho * N^dim).
std::size_t particle_count(double density, int modes, int dim);

}  // namespace dnufft::cli

#include "dnufft_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "dnufft/error.hpp"
#include "dnufft/io.hpp"
#include "dnufft/oracle.hpp"

namespace dnufft::cli {

namespace {

using nlohmann::json;

double max_abs(std::span<const Complex> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_rel_err(std::span<const Complex> got, std::span<const Complex> exact) {
  require(got.size() == exact.size(), ErrorCode::InvalidArgument, "result size mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) diff = std::max(diff, std::abs(got[i] - exact[i]));
  const double scale = max_abs(exact);
  return scale > 0.0 ? diff / scale : diff;
}

double elapsed_ms(double start, const BenchClock& clock) { return (clock() - start) * 1e3; }

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ParticleSet instance(const CommonOptions& o, double density, std::uint64_t seed) {
  if (o.particles.empty())
    return random_particles(o.dim, o.length, particle_count(density, o.modes, o.dim), seed);
  const bool binary = ends_with(o.particles, ".bin");
  std::ifstream in(o.particles, binary ? std::ios::binary : std::ios::in);
  require(in.good(), ErrorCode::InvalidArgument, "cannot open particle file " + o.particles);
  return binary ? read_particles_binary(in, o.dim, o.length)
                : read_particles_csv(in, o.dim, o.length);
}

std::string rank_label(const std::optional<RankGrid>& ranks) {
  return ranks ? to_string(*ranks) : std::string("1,1,1");
}

std::string quoted_ranks(const std::optional<RankGrid>& ranks) {
  // Commas would split the CSV cell.
  auto s = rank_label(ranks);
  std::replace(s.begin(), s.end(), ',', 'x');
  return s;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

const std::vector<std::string>& accuracy_columns() {
  static const std::vector<std::string> c{"type", "N", "Np", "eps", "w", "variant",
                                          "max_rel_err", "runtime_ms"};
  return c;
}

const std::vector<std::string>& bench_columns() {
  static const std::vector<std::string> c{
      "type",       "N",          "Np",          "density",     "eps",
      "w",          "variant",    "interp",      "fft",         "nconc",
      "ranks",      "threads",    "warmup",      "timed",       "median_ms",
      "min_ms",     "max_ms",     "mpts_per_s",  "spread_interp_ms", "fft_ms",
      "deconv_ms",  "halo_ms",    "total_ms",    "halo_messages", "halo_bytes"};
  return c;
}

const std::vector<std::string>& pif_columns() {
  static const std::vector<std::string> c{
      "step",       "t",          "field_energy", "mode_energy", "kinetic_energy", "momentum_x", "momentum_y",
      "momentum_z", "t_scatter", "t_solve",      "t_gather",       "t_push"};
  return c;
}

const std::vector<std::string>& pif_timing_columns() {
  static const std::vector<std::string> c{
      "N",          "Np",         "eps",         "dt",         "warmup",     "timed",
      "median_ms",  "min_ms",     "max_ms",      "t_scatter_ms", "t_solve_ms", "t_gather_ms",
      "t_push_ms"};
  return c;
}

const std::vector<std::string>& verify_columns() {
  static const std::vector<std::string> c{"check", "eps", "value", "tolerance", "status"};
  return c;
}

const std::vector<std::string>& tune_columns() {
  static const std::vector<std::string> c{"w",     "variant", "tile_x",   "tile_y",
                                          "tile_z", "team",   "z_split", "median_ms"};
  return c;
}

Execution CommonOptions::execution() const {
  Execution e;
  e.deterministic = deterministic;
  e.threads = threads;
  return e;
}

PlanOptions CommonOptions::plan_options(SpreadAlgorithm variant, InterpOrdering ordering,
                                        FftStrategy fft, int width) const {
  PlanOptions p;
  if (tuning) {
    p.spread = tuning->variant(variant, width);
  } else {
    p.spread.algorithm = variant;
  }
  p.interp = ordering;
  p.fft = fft;
  p.n_conc = n_conc;
  p.ranks = ranks;
  p.exec = execution();
  return p;
}

std::size_t particle_count(double density, int modes, int dim) {
  require(density > 0.0 && std::isfinite(density), ErrorCode::InvalidArgument,
          "density must be positive");
  return static_cast<std::size_t>(
      std::max(1LL, std::llround(density * std::pow(static_cast<double>(modes), dim))));
}

ParticleSet random_particles(int dim, double length, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, length);
  std::uniform_real_distribution<double> val(-0.5, 0.5);
  std::vector<Vec3> x(count);
  std::vector<Complex> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (int a = 0; a < dim; ++a) x[i][a] = pos(rng);
    const double re = val(rng);
    f[i] = {re, val(rng)};
  }
  return ParticleSet(dim, length, std::move(x), std::move(f));
}

ModeArray random_modes(int dim, int modes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-0.5, 0.5);
  ModeArray m(dim, modes);
  for (auto& v : m.values()) {
    const double re = val(rng);
    v = {re, val(rng)};
  }
  return m;
}

CommandResult cmd_accuracy(const CommonOptions& o) {
  require(!o.eps.empty(), ErrorCode::InvalidArgument, "empty eps list");
  CommandResult r;
  r.table.schema = kAccuracySchema;
  r.table.columns = accuracy_columns();
  const BenchClock clock = steady_seconds;
  for (double density : o.densities) {
    const auto ps = instance(o, density, o.seed);
    for (int type : o.types) {
      require(type == 1 || type == 2, ErrorCode::InvalidArgument, "type must be 1 or 2");
      ModeArray exact1;
      ModeArray coeffs;
      std::vector<Complex> exact2;
      if (type == 1) {
        exact1 = oracle::nudft_type1(ps, o.modes);
      } else {
        coeffs = random_modes(o.dim, o.modes, o.seed + 1);
        exact2 = oracle::nudft_type2(coeffs, ps);
      }
      for (double eps : o.eps) {
        const int w = select_params(eps, o.dim).width;
        auto add_row = [&](const std::string& name, double err, double ms) {
          r.table.add({type, o.modes, ps.size(), eps, w, name, err, ms});
          if (!(err <= 10.0 * eps)) {
            r.status = kExitValidation;
            r.notes.push_back("type " + std::to_string(type) + " " + name + " eps=" +
                              std::to_string(eps) + ": error above 10*eps");
          }
        };
        if (type == 1) {
          for (auto v : o.variants) {
            NufftPlan plan(o.dim, o.modes, o.length, eps,
                           o.plan_options(v, o.orderings.front(), o.ffts.front(), w));
            const double start = clock();
            const auto got = plan.type1(ps);
            const double ms = elapsed_ms(start, clock);
            add_row(to_string(v), max_rel_err(got.values(), exact1.values()), ms);
          }
        } else {
          for (auto ordering : o.orderings) {
            NufftPlan plan(o.dim, o.modes, o.length, eps,
                           o.plan_options(o.variants.front(), ordering, o.ffts.front(), w));
            const double start = clock();
            const auto got = plan.type2(coeffs, ps);
            const double ms = elapsed_ms(start, clock);
            add_row(to_string(ordering), max_rel_err(got, exact2), ms);
          }
        }
      }
    }
  }
  return r;
}

CommandResult cmd_bench(const BenchOptions& options, const Hooks& hooks) {
  const auto& o = options.common;
  require(!o.eps.empty(), ErrorCode::InvalidArgument, "empty eps list");
  require(!o.densities.empty(), ErrorCode::InvalidArgument, "empty density list");
  CommandResult r;
  r.table.schema = kBenchSchema;
  r.table.columns = bench_columns();
  const int threads = o.execution().resolved_threads();

  for (int type : o.types) {
    require(type == 1 || type == 2, ErrorCode::InvalidArgument, "type must be 1 or 2");
    for (double density : o.densities) {
      const auto ps = instance(o, density, o.seed);
      const auto coeffs = random_modes(o.dim, o.modes, o.seed + 1);
      for (double eps : o.eps) {
        const int w = select_params(eps, o.dim).width;
        for (auto fft : o.ffts) {
          struct Config {
            SpreadAlgorithm variant;
            InterpOrdering ordering;
          };
          std::vector<Config> configs;
          if (type == 1) {
            for (auto v : o.variants) configs.push_back({v, o.orderings.front()});
          } else {
            for (auto ord : o.orderings) configs.push_back({o.variants.front(), ord});
          }
          for (const auto& c : configs) {
            NufftPlan plan(o.dim, o.modes, o.length, eps,
                           o.plan_options(c.variant, c.ordering, fft, w));
            std::vector<StageTimes> stages;
            auto body = [&] {
              StageTimes t;
              if (type == 1) {
                plan.type1(ps, &t);
              } else {
                plan.type2(coeffs, ps, &t);
              }
              stages.push_back(t);
              if (hooks.on_execute) hooks.on_execute();
            };
            const auto res = run_benchmark(body, options.protocol, hooks.clock);
            // Stage medians over the timed runs only.
            const auto first = stages.end() - res.timed_runs;
            auto stage_median = [&](double StageTimes::*slot) {
              std::vector<double> v;
              for (auto it = first; it != stages.end(); ++it) v.push_back((*it).*slot * 1e3);
              return median_of(std::move(v));
            };
            const auto traffic = plan.traffic();
            const auto runs = static_cast<std::uint64_t>(res.warmup_runs + res.timed_runs);
            r.table.add({type,
                         o.modes,
                         ps.size(),
                         density,
                         eps,
                         w,
                         type == 1 ? to_string(c.variant) : "-",
                         type == 2 ? to_string(c.ordering) : "-",
                         to_string(fft),
                         o.n_conc,
                         quoted_ranks(o.ranks),
                         threads,
                         res.warmup_runs,
                         res.timed_runs,
                         res.median * 1e3,
                         res.min * 1e3,
                         res.max * 1e3,
                         res.mpts_per_second(ps.size()),
                         stage_median(&StageTimes::spread_interp),
                         stage_median(&StageTimes::fft),
                         stage_median(&StageTimes::deconv),
                         stage_median(&StageTimes::halo),
                         stage_median(&StageTimes::total),
                         traffic.messages / runs,
                         traffic.bytes / runs});
          }
        }
      }
    }
  }
  return r;
}

CommandResult cmd_pif(const PifOptions& options, const Hooks& hooks) {
  CommandResult r;
  PifSimulation sim(options.config);
  const auto& c = sim.config();
  if (options.timing) {
    r.table.schema = kPifTimingSchema;
    r.table.columns = pif_timing_columns();
    std::vector<StepDiagnostics> steps;
    auto body = [&] {
      steps.push_back(sim.step());
      if (hooks.on_execute) hooks.on_execute();
    };
    const auto res = run_benchmark(body, BenchProtocol{3, 10}, hooks.clock);
    const auto first = steps.end() - res.timed_runs;
    auto phase = [&](double StepDiagnostics::*slot) {
      std::vector<double> v;
      for (auto it = first; it != steps.end(); ++it) v.push_back((*it).*slot * 1e3);
      return median_of(std::move(v));
    };
    r.table.add({c.modes, c.particles(), c.eps, c.dt, res.warmup_runs, res.timed_runs,
                 res.median * 1e3, res.min * 1e3, res.max * 1e3,
                 phase(&StepDiagnostics::t_scatter), phase(&StepDiagnostics::t_solve),
                 phase(&StepDiagnostics::t_gather), phase(&StepDiagnostics::t_push)});
    return r;
  }

  r.table.schema = kPifSchema;
  r.table.columns = pif_columns();
  const auto series = sim.run();
  for (const auto& d : series)
    r.table.add({d.step, d.t, d.field_energy, d.mode_energy, d.kinetic_energy, d.momentum[0], d.momentum[1],
                 d.momentum[2], d.t_scatter, d.t_solve, d.t_gather, d.t_push});
  for (const auto& d : series)
    if (!std::isfinite(d.field_energy) || !std::isfinite(d.kinetic_energy)) {
      r.status = kExitValidation;
      r.notes.push_back("non-finite diagnostics at step " + std::to_string(d.step));
      break;
    }
  if (options.fit) {
    const double t_end = series.back().t;
    try {
      const auto fit = fit_damping(series, 0.0, std::min(20.0, t_end));
      const auto root = oracle::landau_root(c.k);
      r.notes.push_back("damping fit: gamma=" + std::to_string(fit.gamma) + " stderr=" +
                        std::to_string(fit.gamma_stderr) + " peaks=" +
                        std::to_string(fit.peak_times.size()) +
                        " landau_gamma=" + std::to_string(root.imag()));
    } catch (const Error& e) {
      r.notes.push_back(std::string("damping fit unavailable: ") + e.what());
    }
  }
  return r;
}

CommandResult cmd_verify(const CommonOptions& o) {
  require(!o.eps.empty(), ErrorCode::InvalidArgument, "empty eps list");
  CommandResult r;
  r.table.schema = kVerifySchema;
  r.table.columns = verify_columns();
  const auto ps = instance(o, o.densities.front(), o.seed);
  const auto coeffs = random_modes(o.dim, o.modes, o.seed + 1);
  const auto exact1 = oracle::nudft_type1(ps, o.modes);
  const auto exact2 = oracle::nudft_type2(coeffs, ps);

  auto check = [&](const std::string& name, double eps, double value, double tol) {
    const bool ok = value <= tol;
    r.table.add({name, eps, value, tol, ok ? "PASS" : "FAIL"});
    if (!ok) r.status = kExitValidation;
  };

  // The oracle pair itself is adjoint.
  const auto o1 = inner(exact1.values(), coeffs.values());
  const auto o2 = inner(ps.strengths(), exact2);
  check("oracle_adjoint", 0.0, std::abs(o1 - o2) / std::max(std::abs(o1), 1e-300), 1e-12);

  for (double eps : o.eps) {
    const int w = select_params(eps, o.dim).width;
    for (auto v : o.variants)
      for (auto ordering : o.orderings)
        for (auto fft : o.ffts) {
          NufftPlan plan(o.dim, o.modes, o.length, eps, o.plan_options(v, ordering, fft, w));
          const auto t1 = plan.type1(ps);
          const auto t2 = plan.type2(coeffs, ps);
          const std::string tag = std::string(to_string(v)) + "/" + to_string(ordering) + "/" +
                                  to_string(fft);
          check("type1/" + tag, eps, max_rel_err(t1.values(), exact1.values()), 10.0 * eps);
          check("type2/" + tag, eps, max_rel_err(t2, exact2), 10.0 * eps);
          const auto a = inner(t1.values(), coeffs.values());
          const auto b = inner(ps.strengths(), t2);
          check("adjoint/" + tag, eps, std::abs(a - b) / std::max(std::abs(a), 1e-300), 1e-12);
        }
  }
  return r;
}

CommandResult cmd_tune(const TuneOptions& options, TuningTable& best, const Hooks& hooks) {
  const auto& o = options.common;
  require(!o.eps.empty(), ErrorCode::InvalidArgument, "empty eps list");
  CommandResult r;
  r.table.schema = kTuneSchema;
  r.table.columns = tune_columns();
  const auto ps = random_particles(o.dim, o.length,
                                   particle_count(o.densities.front(), o.modes, o.dim), o.seed);
  const std::vector<std::array<int, 3>> tiles{{4, 4, 4}, {8, 8, 4}, {8, 8, 8}, {16, 16, 4}, {16, 16, 8}};
  const std::vector<int> teams{1, 2, 4, 8};
  const Execution exec = o.execution();

  std::set<int> widths;
  for (double eps : o.eps) widths.insert(select_params(eps, o.dim).width);
  for (int w : widths) {
    const auto spec = window_for_width(w, o.dim);
    std::set<int> splits{1, 2, 4, w};
    double best_ms = 0.0;
    TuningEntry best_entry;
    best_entry.z_split = default_z_split(w);
    bool have_best = false;
    auto try_variant = [&](const SpreadVariant& v) {
      auto grid = OversampledGrid::global(o.dim, o.modes, o.length, spec.halo_width());
      auto body = [&] {
        grid.clear();
        spread(ps, spec, grid, v, exec);
        if (hooks.on_execute) hooks.on_execute();
      };
      const auto res = run_benchmark(body, options.protocol, hooks.clock);
      const double ms = res.median * 1e3;
      r.table.add({w, to_string(v.algorithm), v.tile[0], v.tile[1], v.tile[2], v.team_size,
                   v.z_split, ms});
      if (!have_best || ms < best_ms) {
        have_best = true;
        best_ms = ms;
        best_entry = TuningEntry{v.tile, v.team_size, v.z_split};
      }
    };
    for (const auto& tile : tiles) {
      for (int zs : splits) {
        if (zs > w) continue;
        SpreadVariant v{SpreadAlgorithm::Tiled, tile, 4, zs};
        try_variant(v);
      }
      for (int team : teams) {
        SpreadVariant v{SpreadAlgorithm::GridParallel, tile, team, default_z_split(w)};
        try_variant(v);
      }
    }
    best.set(w, best_entry);
  }
  return r;
}

}  // namespace dnufft::cli

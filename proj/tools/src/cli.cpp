#include "dnufft_cli/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>

#include "dnufft/error.hpp"
#include "dnufft/io.hpp"

namespace dnufft::cli {

namespace {

/// Raw flag text shared by the subcommands; converted after parsing.
struct RawFlags {
  int dim = 3;
  std::string type = "1";
  int modes = 16;
  std::string density = "1";
  std::string eps = "1e-2,1e-4,1e-6,1e-8";
  std::string variant = "atomic";
  std::string interp = "direct";
  std::string fft = "full";
  int nconc = 4;
  std::string ranks;
  std::uint64_t seed = 1;
  int threads = 0;
  bool deterministic = false;
  double length = 6.283185307179586;
  std::string out;
  std::string format = "csv";
  std::string tuning;
  std::string particles;
};

void add_common(CLI::App& cmd, RawFlags& f) {
  cmd.add_option("--dim", f.dim, "Problem dimension (1, 2 or 3)")->check(CLI::Range(1, 3));
  cmd.add_option("--type", f.type, "NUFFT type: 1, 2 or a list such as 1,2");
  cmd.add_option("--modes", f.modes, "Retained modes N per axis (even)");
  cmd.add_option("--density", f.density, "Particles per retained mode; comma list sweeps");
  cmd.add_option("--eps", f.eps, "Tolerance list, comma separated");
  cmd.add_option("--variant", f.variant, "Spread variant: atomic, tiled, gridpar or all");
  cmd.add_option("--interp", f.interp, "Interpolation ordering: direct, morton, bin or all");
  cmd.add_option("--fft", f.fft, "FFT strategy: full, pruned or all");
  cmd.add_option("--nconc", f.nconc, "Concurrent sub-transforms of the pruned FFT");
  cmd.add_option("--ranks", f.ranks, "Simulated rank grid P1,P2,P3");
  cmd.add_option("--seed", f.seed, "Seed for every random input");
  cmd.add_option("--threads", f.threads, "Worker thread cap (0: OpenMP default)");
  cmd.add_flag("--deterministic", f.deterministic, "Serial, bitwise reproducible execution");
  cmd.add_option("--length", f.length, "Domain length L");
  cmd.add_option("--out", f.out, "Output file (default: stdout)");
  cmd.add_option("--format", f.format, "Output format: csv or json");
  cmd.add_option("--tuning", f.tuning, "Tuning table consulted for spread parameters");
  cmd.add_option("--particles", f.particles, "Particle file (CSV, or raw binary *.bin)");
}

template <typename T, typename Parse>
std::vector<T> parse_choice(const std::string& text, const std::vector<T>& all, Parse parse) {
  if (text == "all") return all;
  std::vector<T> out;
  for (const auto& piece : split_list(text)) out.push_back(parse(piece));
  require(!out.empty(), ErrorCode::InvalidArgument, "empty choice list");
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& piece : split_list(text))
    if (!piece.empty()) out.push_back(parse_double(piece, what));
  return out;
}

CommonOptions convert(const RawFlags& f) {
  CommonOptions o;
  o.dim = f.dim;
  o.types.clear();
  for (const auto& t : split_list(f.type)) o.types.push_back(static_cast<int>(parse_int(t, "--type")));
  for (int t : o.types)
    require(t == 1 || t == 2, ErrorCode::InvalidArgument, "--type must be 1 or 2");
  require(!o.types.empty(), ErrorCode::InvalidArgument, "--type is empty");
  o.modes = f.modes;
  o.densities = parse_doubles(f.density, "--density");
  require(!o.densities.empty(), ErrorCode::InvalidArgument, "empty density list");
  o.eps = parse_doubles(f.eps, "--eps");
  require(!o.eps.empty(), ErrorCode::InvalidArgument, "empty eps list");
  for (double e : o.eps)
    require(e >= kMinTolerance && e <= kMaxTolerance, ErrorCode::ToleranceOutOfRange,
            "eps outside [1e-12, 1e-1]");
  o.variants = parse_choice<SpreadAlgorithm>(
      f.variant,
      {SpreadAlgorithm::Atomic, SpreadAlgorithm::Tiled, SpreadAlgorithm::GridParallel},
      parse_spread_algorithm);
  o.orderings = parse_choice<InterpOrdering>(
      f.interp, {InterpOrdering::Direct, InterpOrdering::Morton, InterpOrdering::Bin},
      parse_interp_ordering);
  o.ffts = parse_choice<FftStrategy>(f.fft, {FftStrategy::Full, FftStrategy::Pruned},
                                     parse_fft_strategy);
  o.n_conc = f.nconc;
  if (!f.ranks.empty()) o.ranks = parse_rank_grid(f.ranks);
  o.seed = f.seed;
  o.threads = f.threads;
  o.deterministic = f.deterministic;
  o.length = f.length;
  if (!f.tuning.empty()) o.tuning = load_tuning_table(f.tuning);
  o.particles = f.particles;
  return o;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ToleranceOutOfRange:
    case ErrorCode::ParseError:
    case ErrorCode::DecompositionInvalid:
    case ErrorCode::CostCapExceeded:
    case ErrorCode::PositionOutOfDomain:
    case ErrorCode::NonFiniteValue:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

void emit(const CommandResult& result, const RawFlags& f, std::ostream& out, std::ostream& err) {
  const auto format = parse_format(f.format);
  if (f.out.empty()) {
    write_table(out, result.table, format);
  } else {
    std::ofstream file(f.out);
    require(file.good(), ErrorCode::InvalidArgument, "cannot write " + f.out);
    write_table(file, result.table, format);
  }
  for (const auto& note : result.notes) err << note << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Hooks& hooks) {
  CLI::App app{"Distributed NUFFT tools: accuracy sweeps, benchmarks, PIF runs"};
  app.name("dnufft");
  app.require_subcommand(1);

  RawFlags acc_flags;
  auto* accuracy = app.add_subcommand("accuracy", "Compare Type 1/2 against the direct sums");
  add_common(*accuracy, acc_flags);

  RawFlags bench_flags;
  BenchProtocol protocol;
  auto* bench = app.add_subcommand("bench", "Time NUFFT executions (warm-up + timed runs)");
  add_common(*bench, bench_flags);
  bench->add_option("--warmup", protocol.warmup, "Warm-up executions per configuration");
  bench->add_option("--timed", protocol.timed, "Timed executions per configuration");

  RawFlags verify_flags;
  std::string dump_path;
  auto* verify = app.add_subcommand("verify", "Oracle self-checks; exit 3 on failure");
  add_common(*verify, verify_flags);
  verify->add_option("--dump", dump_path, "Write the spread grid of the first eps here");

  RawFlags tune_flags;
  BenchProtocol tune_protocol{1, 3};
  std::string table_out;
  auto* tune = app.add_subcommand("tune", "Exhaustive spread parameter sweep");
  add_common(*tune, tune_flags);
  tune->add_option("--warmup", tune_protocol.warmup, "Warm-up executions per candidate");
  tune->add_option("--timed", tune_protocol.timed, "Timed executions per candidate");
  tune->add_option("--table", table_out, "Write the best parameters as a tuning table");

  // PIF settings are collected as key/value overrides on top of the config.
  std::string pif_config;
  std::string pif_out;
  std::string pif_format = "csv";
  std::string pif_tuning;
  bool pif_timing = false;
  bool pif_fit = false;
  std::vector<std::pair<std::string, std::string>> overrides;
  auto* pif = app.add_subcommand("pif", "Landau damping particle-in-Fourier run");
  pif->add_option("--config", pif_config, "Config file of key = value lines");
  const std::map<std::string, std::string> pif_keys{
      {"--modes", "modes"},   {"--density", "density"},   {"--alpha", "alpha"},
      {"--k", "k"},           {"--eps", "eps"},           {"--dt", "dt"},
      {"--steps", "steps"},   {"--seed", "seed"},         {"--sampling", "sampling"},
      {"--variant", "variant"}, {"--interp", "interp"},   {"--fft", "fft"},
      {"--nconc", "nconc"},   {"--ranks", "ranks"},       {"--threads", "threads"},
      {"--sort-interval", "sort_interval"}};
  for (const auto& [flag, key] : pif_keys) {
    pif->add_option_function<std::string>(
        flag, [&overrides, key = key](const std::string& v) { overrides.emplace_back(key, v); },
        "Overrides config key '" + key + "'");
  }
  pif->add_flag_function(
      "--deterministic",
      [&overrides](std::int64_t) { overrides.emplace_back("deterministic", "true"); },
      "Serial, bitwise reproducible execution");
  pif->add_option("--tuning", pif_tuning, "Tuning table consulted for spread parameters");
  pif->add_flag("--timing", pif_timing, "Report 3 warm-up + 10 timed step timings instead");
  pif->add_flag("--fit", pif_fit, "Print the damping-rate fit to stderr");
  pif->add_option("--out", pif_out, "Output file (default: stdout)");
  pif->add_option("--format", pif_format, "Output format: csv or json");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (accuracy->parsed()) {
      const auto result = cmd_accuracy(convert(acc_flags));
      emit(result, acc_flags, out, err);
      return result.status;
    }
    if (bench->parsed()) {
      BenchOptions b{convert(bench_flags), protocol};
      const auto result = cmd_bench(b, hooks);
      emit(result, bench_flags, out, err);
      return result.status;
    }
    if (verify->parsed()) {
      const auto o = convert(verify_flags);
      const auto result = cmd_verify(o);
      if (!dump_path.empty()) {
        const auto ps = random_particles(o.dim, o.length,
                                         particle_count(o.densities.front(), o.modes, o.dim),
                                         o.seed);
        const auto spec = select_params(o.eps.front(), o.dim);
        auto grid = OversampledGrid::global(o.dim, o.modes, o.length, spec.halo_width());
        spread(ps, spec, grid, SpreadVariant{}, o.execution());
        std::ofstream file(dump_path, std::ios::binary);
        require(file.good(), ErrorCode::InvalidArgument, "cannot write " + dump_path);
        write_grid_dump(file, grid);
      }
      emit(result, verify_flags, out, err);
      return result.status;
    }
    if (tune->parsed()) {
      TuneOptions t{convert(tune_flags), tune_protocol};
      TuningTable best;
      const auto result = cmd_tune(t, best, hooks);
      if (!table_out.empty()) save_tuning_table(table_out, best);
      emit(result, tune_flags, out, err);
      return result.status;
    }
    if (pif->parsed()) {
      PifOptions p;
      if (!pif_config.empty()) p.config = load_pif_config(pif_config);
      for (const auto& [key, value] : overrides) set_pif_option(p.config, key, value);
      if (!pif_tuning.empty()) {
        const auto table = load_tuning_table(pif_tuning);
        const int w = select_params(p.config.eps, 3).width;
        p.config.plan.spread = table.variant(p.config.plan.spread.algorithm, w);
      }
      p.config.validate();
      p.timing = pif_timing;
      p.fit = pif_fit;
      const auto result = cmd_pif(p, hooks);
      RawFlags f;
      f.out = pif_out;
      f.format = pif_format;
      emit(result, f, out, err);
      return result.status;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const int code = exit_code_for(e.code());
    if (code == kExitUsage) err << "run with --help for usage\n";
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace dnufft::cli

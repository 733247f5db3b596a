#include "dnufft/pif.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

#include "dnufft/error.hpp"
#include "dnufft/io.hpp"

namespace dnufft {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::array<int, 6> kHaltonBases{2, 3, 5, 7, 11, 13};

double radical_inverse(std::uint64_t i, int base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

/// Standard normal quantile, with u clamped away from 0 and 1.
double normal_quantile(double u) {
  constexpr double tiny = 1e-300;
  u = std::clamp(u, tiny, 1.0 - 1e-16);
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(ErrorCode::ParseError, "expected a boolean for " + key + ", got '" + value + "'");
}

}  // namespace

const char* to_string(SamplingMode mode) noexcept {
  return mode == SamplingMode::Quiet ? "quiet" : "random";
}

SamplingMode parse_sampling_mode(const std::string& name) {
  if (name == "quiet") return SamplingMode::Quiet;
  if (name == "random") return SamplingMode::Random;
  fail(ErrorCode::ParseError, "unknown sampling mode '" + name + "'");
}

double PifConfig::length() const { return 2.0 * std::numbers::pi / k; }

std::size_t PifConfig::particles() const {
  const double n = static_cast<double>(modes);
  return static_cast<std::size_t>(std::llround(density * n * n * n));
}

void PifConfig::validate() const {
  require(modes >= 2 && modes % 2 == 0, ErrorCode::InvalidArgument,
          "modes must be even and >= 2");
  require(density > 0.0 && std::isfinite(density), ErrorCode::InvalidArgument,
          "density must be positive");
  require(alpha >= 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must be in [0, 1)");
  require(k > 0.0 && std::isfinite(k), ErrorCode::InvalidArgument, "k must be positive");
  require(dt >= 0.0 && std::isfinite(dt), ErrorCode::InvalidArgument, "dt must be >= 0");
  require(steps >= 0, ErrorCode::InvalidArgument, "steps must be >= 0");
  require(sort_interval >= 0, ErrorCode::InvalidArgument, "sort_interval must be >= 0");
  require(particles() > 0, ErrorCode::InvalidArgument, "no particles");
}

double sample_perturbed_position(double u, double alpha, double k) {
  const double length = 2.0 * std::numbers::pi / k;
  const double target = u * length;
  double x = target;
  for (int it = 0; it < 50; ++it) {
    const double g = x + alpha / k * std::sin(k * x) - target;
    const double dg = 1.0 + alpha * std::cos(k * x);
    const double step = g / dg;
    x -= step;
    if (std::abs(step) <= 1e-15 * length) break;
  }
  return wrap_position(x, length);
}

PlasmaState sample_initial(std::size_t count, double alpha, double k, std::uint64_t seed,
                           SamplingMode mode) {
  require(alpha >= 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must be in [0, 1)");
  require(k > 0.0, ErrorCode::InvalidArgument, "k must be positive");
  PlasmaState s;
  s.length = 2.0 * std::numbers::pi / k;
  s.charge = -(s.length * s.length * s.length) / static_cast<double>(count);
  s.positions.resize(count);
  s.velocities.resize(count);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  if (mode == SamplingMode::Quiet) {
    std::array<double, 6> shift{};
    for (auto& v : shift) v = uniform(rng);
    for (std::size_t i = 0; i < count; ++i) {
      std::array<double, 6> u{};
      for (int d = 0; d < 6; ++d) {
        const double h = radical_inverse(i + 1, kHaltonBases[static_cast<std::size_t>(d)]) +
                         shift[static_cast<std::size_t>(d)];
        u[static_cast<std::size_t>(d)] = h - std::floor(h);
      }
      for (int a = 0; a < 3; ++a) {
        s.positions[i][a] = sample_perturbed_position(u[static_cast<std::size_t>(a)], alpha, k);
        s.velocities[i][a] = normal_quantile(u[static_cast<std::size_t>(a + 3)]);
      }
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      for (int a = 0; a < 3; ++a) s.positions[i][a] = sample_perturbed_position(uniform(rng), alpha, k);
      for (int a = 0; a < 3; ++a) s.velocities[i][a] = normal_quantile(uniform(rng));
    }
  }
  return s;
}

PifSimulation::PifSimulation(PifConfig config)
    : PifSimulation(config, [&] {
        config.validate();
        return sample_initial(config.particles(), config.alpha, config.k, config.seed,
                              config.sampling);
      }()) {}

PifSimulation::PifSimulation(PifConfig config, PlasmaState initial)
    : config_(std::move(config)),
      plan_(3, config_.modes, config_.length(), config_.eps, config_.plan),
      state_(std::move(initial)) {
  config_.validate();
  require(state_.positions.size() == state_.velocities.size(), ErrorCode::InvalidArgument,
          "position and velocity counts differ");
  require(std::abs(state_.length - config_.length()) <= 1e-12 * config_.length(),
          ErrorCode::InvalidArgument, "state built for another domain length");
  state_.dt = config_.dt;
  state_.rho_k = ModeArray(3, config_.modes);
  for (auto& e : state_.e_k) e = ModeArray(3, config_.modes);
}

double PifSimulation::total_charge() const {
  return state_.charge * static_cast<double>(state_.positions.size());
}

void PifSimulation::compute_field() {
  const int n = config_.modes;
  const double length = config_.length();
  const double volume = length * length * length;

  auto start = Clock::now();
  std::vector<double> q(state_.positions.size(), state_.charge);
  const ParticleSet charges(3, length, state_.positions, q);
  state_.rho_k = plan_.type1(charges);
  // The uniform ion background cancels the electron k = 0 mode exactly.
  state_.rho_k(0, 0, 0) = Complex{};
  t_scatter_ = seconds_since(start);

  start = Clock::now();
  const double kunit = 2.0 * std::numbers::pi / length;
  auto rho = state_.rho_k.values();
  std::array<std::span<Complex>, 3> e{state_.e_k[0].values(), state_.e_k[1].values(),
                                      state_.e_k[2].values()};
  std::size_t idx = 0;
  for (int i2 = 0; i2 < n; ++i2)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i0 = 0; i0 < n; ++i0, ++idx) {
        const int f[3] = {ModeArray::frequency(i0, n), ModeArray::frequency(i1, n),
                          ModeArray::frequency(i2, n)};
        const bool nyquist = f[0] == -n / 2 || f[1] == -n / 2 || f[2] == -n / 2;
        const double k2 = kunit * kunit * (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
        if (nyquist || k2 == 0.0) {
          for (int a = 0; a < 3; ++a) e[static_cast<std::size_t>(a)][idx] = Complex{};
          continue;
        }
        for (int a = 0; a < 3; ++a)
          e[static_cast<std::size_t>(a)][idx] = Complex(0.0, -kunit * f[a] / k2) * rho[idx];
      }
  t_solve_ = seconds_since(start);

  start = Clock::now();
  // E_x and E_y are real, so one Type 2 of E_x + i E_y returns both.
  std::array<ModeArray, 2> packed{state_.e_k[0], state_.e_k[2]};
  {
    auto xy = packed[0].values();
    const auto ey = state_.e_k[1].values();
    for (std::size_t i = 0; i < xy.size(); ++i) xy[i] += Complex(0.0, 1.0) * ey[i];
  }
  const auto points = ParticleSet::positions_only(3, length, state_.positions);
  const auto gathered = plan_.type2_many(packed, points);
  field_.resize(state_.positions.size());
  const double scale = 1.0 / volume;
  for (std::size_t j = 0; j < field_.size(); ++j) {
    field_[j][0] = scale * gathered[0][j].real();
    field_[j][1] = scale * gathered[0][j].imag();
    field_[j][2] = scale * gathered[1][j].real();
  }
  t_gather_ = seconds_since(start);
  field_valid_ = true;
}

double PifSimulation::field_energy() const {
  const double length = config_.length();
  double sum = 0.0;
  for (const auto& e : state_.e_k)
    for (const auto& v : e.values()) sum += std::norm(v);
  return sum / (2.0 * length * length * length);
}

double PifSimulation::mode_energy() const {
  const double length = config_.length();
  double sum = 0.0;
  for (const auto& e : state_.e_k)
    for (int s : {-1, 1}) sum += std::norm(e(s, 0, 0)) + std::norm(e(0, s, 0)) + std::norm(e(0, 0, s));
  return sum / (2.0 * length * length * length);
}

double PifSimulation::kinetic_energy() const {
  const double mass = -state_.charge;
  double sum = 0.0;
  for (const auto& v : state_.velocities) sum += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  return 0.5 * mass * sum;
}

Vec3 PifSimulation::momentum() const {
  const double mass = -state_.charge;
  Vec3 p{0.0, 0.0, 0.0};
  for (const auto& v : state_.velocities)
    for (int a = 0; a < 3; ++a) p[a] += v[a];
  for (auto& c : p) c *= mass;
  return p;
}

StepDiagnostics PifSimulation::diagnose() {
  if (!field_valid_) compute_field();
  StepDiagnostics d;
  d.step = state_.step;
  d.t = state_.t;
  d.field_energy = field_energy();
  d.mode_energy = mode_energy();
  d.kinetic_energy = kinetic_energy();
  d.momentum = momentum();
  d.t_scatter = t_scatter_;
  d.t_solve = t_solve_;
  d.t_gather = t_gather_;
  return d;
}

void PifSimulation::sort_particles() {
  const auto points = ParticleSet::positions_only(3, config_.length(), state_.positions);
  const auto perm = morton_permutation(points, plan_.fine());
  std::vector<Vec3> x(perm.size());
  std::vector<Vec3> v(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    x[i] = state_.positions[perm[i]];
    v[i] = state_.velocities[perm[i]];
  }
  state_.positions = std::move(x);
  state_.velocities = std::move(v);
  field_valid_ = false;
}

StepDiagnostics PifSimulation::step() {
  if (config_.sort_interval > 0 && state_.step % config_.sort_interval == 0) sort_particles();
  if (!field_valid_) compute_field();
  const double dt = config_.dt;
  const double length = config_.length();
  const auto np = static_cast<std::int64_t>(state_.positions.size());
  const int threads = config_.plan.exec.resolved_threads();
  auto& x = state_.positions;
  auto& v = state_.velocities;

  // q/m = -1: dv/dt = -E.
  auto start = Clock::now();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t j = 0; j < np; ++j)
    for (int a = 0; a < 3; ++a) {
      auto& vj = v[static_cast<std::size_t>(j)][a];
      vj -= 0.5 * dt * field_[static_cast<std::size_t>(j)][a];
      auto& xj = x[static_cast<std::size_t>(j)][a];
      xj = wrap_position(xj + dt * vj, length);
    }
  double t_push = seconds_since(start);

  compute_field();

  start = Clock::now();
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t j = 0; j < np; ++j)
    for (int a = 0; a < 3; ++a)
      v[static_cast<std::size_t>(j)][a] -= 0.5 * dt * field_[static_cast<std::size_t>(j)][a];
  t_push += seconds_since(start);

  ++state_.step;
  state_.t = state_.step * dt;
  auto d = diagnose();
  d.t_push = t_push;
  return d;
}

std::vector<StepDiagnostics> PifSimulation::run() {
  std::vector<StepDiagnostics> out;
  out.reserve(static_cast<std::size_t>(config_.steps) + 1);
  out.push_back(diagnose());
  for (int s = 0; s < config_.steps; ++s) out.push_back(step());
  return out;
}

DampingFit fit_damping(std::span<const StepDiagnostics> series, double t_min, double t_max,
                       EnergySeries energy) {
  auto value = [&](std::size_t i) {
    return energy == EnergySeries::Mode ? series[i].mode_energy : series[i].field_energy;
  };
  DampingFit fit;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const auto& d = series[i];
    if (d.t < t_min || d.t > t_max) continue;
    if (value(i) > value(i - 1) && value(i) >= value(i + 1) && value(i) > 0.0) {
      fit.peak_times.push_back(d.t);
      fit.peak_energies.push_back(value(i));
    }
  }
  const auto n = fit.peak_times.size();
  require(n >= 3, ErrorCode::InvalidArgument, "fewer than three field-energy peaks to fit");
  double st = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    st += fit.peak_times[i];
    sy += std::log(fit.peak_energies[i]);
  }
  const double tm = st / static_cast<double>(n);
  const double ym = sy / static_cast<double>(n);
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = fit.peak_times[i] - tm;
    stt += dt * dt;
    sty += dt * (std::log(fit.peak_energies[i]) - ym);
  }
  const double slope = sty / stt;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(fit.peak_energies[i]) - ym - slope * (fit.peak_times[i] - tm);
    rss += r * r;
  }
  const double se = std::sqrt(rss / static_cast<double>(n - 2) / stt);
  fit.gamma = 0.5 * slope;
  fit.gamma_stderr = 0.5 * se;
  return fit;
}

void set_pif_option(PifConfig& c, const std::string& key, const std::string& value) {
  if (key == "modes") {
    c.modes = static_cast<int>(parse_int(value, key));
  } else if (key == "density") {
    c.density = parse_double(value, key);
  } else if (key == "alpha") {
    c.alpha = parse_double(value, key);
  } else if (key == "k") {
    c.k = parse_double(value, key);
  } else if (key == "eps") {
    c.eps = parse_double(value, key);
  } else if (key == "dt") {
    c.dt = parse_double(value, key);
  } else if (key == "steps") {
    c.steps = static_cast<int>(parse_int(value, key));
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_int(value, key));
  } else if (key == "sampling") {
    c.sampling = parse_sampling_mode(value);
  } else if (key == "sort_interval") {
    c.sort_interval = static_cast<int>(parse_int(value, key));
  } else if (key == "variant") {
    c.plan.spread.algorithm = parse_spread_algorithm(value);
  } else if (key == "interp") {
    c.plan.interp = parse_interp_ordering(value);
  } else if (key == "fft") {
    c.plan.fft = parse_fft_strategy(value);
  } else if (key == "nconc") {
    c.plan.n_conc = static_cast<int>(parse_int(value, key));
  } else if (key == "ranks") {
    c.plan.ranks = parse_rank_grid(value);
  } else if (key == "threads") {
    c.plan.exec.threads = static_cast<int>(parse_int(value, key));
  } else if (key == "deterministic") {
    c.plan.exec.deterministic = parse_bool(value, key);
  } else {
    fail(ErrorCode::ParseError, "unknown PIF setting '" + key + "'");
  }
}

PifConfig parse_pif_config(std::istream& in, PifConfig base) {
  const auto sections = parse_key_values(in);
  require(sections.size() == 1, ErrorCode::ParseError, "PIF config takes no sections");
  for (const auto& [key, value] : sections.at("")) set_pif_option(base, key, value);
  base.validate();
  return base;
}

PifConfig load_pif_config(const std::string& path, PifConfig base) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::InvalidArgument, "cannot open PIF config " + path);
  return parse_pif_config(in, std::move(base));
}

void write_diagnostics_row(std::ostream& out, const StepDiagnostics& d) {
  out << d.step << ',' << d.t << ',' << d.field_energy << ',' << d.mode_energy << ','
      << d.kinetic_energy << ',' << d.momentum[0] << ',' << d.momentum[1] << ','
      << d.momentum[2] << ',' << d.t_scatter << ',' << d.t_solve << ',' << d.t_gather << ','
      << d.t_push << '\n';
}

void write_diagnostics_csv(std::ostream& out, std::span<const StepDiagnostics> series,
                           bool header) {
  const auto precision = out.precision(17);
  if (header) out << kPifCsvHeader << '\n';
  for (const auto& d : series) write_diagnostics_row(out, d);
  out.precision(precision);
}

}  // namespace dnufft

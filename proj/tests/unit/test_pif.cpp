#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dnufft/error.hpp"
#include "dnufft/pif.hpp"
#include "reference.hpp"

using namespace dnufft;

namespace {

PifConfig small_config() {
  PifConfig c;
  c.modes = 8;
  c.density = 4;
  c.steps = 5;
  c.eps = 1e-6;
  c.dt = 0.05;
  c.sort_interval = 2;
  return c;
}

std::vector<StepDiagnostics> synthetic(double gamma, double omega, double dt, int steps) {
  std::vector<StepDiagnostics> s;
  for (int i = 0; i <= steps; ++i) {
    StepDiagnostics d;
    d.step = i;
    d.t = i * dt;
    const double c = std::cos(omega * d.t);
    d.mode_energy = std::exp(2.0 * gamma * d.t) * c * c;
    d.field_energy = d.mode_energy + 1.0;
    s.push_back(d);
  }
  return s;
}

}  // namespace

TEST(Pif, PerturbedPositionInvertsTheCdf) {
  const double alpha = 0.3, k = 0.5, length = 2.0 * std::numbers::pi / k;
  for (double u : {0.0, 0.1, 0.37, 0.5, 0.93}) {
    const double x = sample_perturbed_position(u, alpha, k);
    EXPECT_NEAR((x + alpha / k * std::sin(k * x)) / length, u, 1e-14);
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, length);
  }
}

TEST(Pif, InitialSampleMoments) {
  for (auto mode : {SamplingMode::Quiet, SamplingMode::Random}) {
    const auto s = sample_initial(20000, 0.05, 0.5, 7, mode);
    EXPECT_EQ(s.positions.size(), 20000u);
    EXPECT_NEAR(s.charge * 20000, -std::pow(s.length, 3), 1e-9 * std::pow(s.length, 3));
    double m = 0.0, v2 = 0.0, c = 0.0;
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
      m += s.velocities[i][1];
      v2 += s.velocities[i][1] * s.velocities[i][1];
      c += std::cos(0.5 * s.positions[i][0]);
    }
    m /= 20000;
    v2 /= 20000;
    c /= 20000;
    EXPECT_NEAR(m, 0.0, 0.03) << to_string(mode);
    EXPECT_NEAR(v2, 1.0, 0.05) << to_string(mode);
    // <cos kx> = alpha / 2 under density 1 + alpha cos kx.
    EXPECT_NEAR(c, 0.025, 0.02) << to_string(mode);
    const auto again = sample_initial(20000, 0.05, 0.5, 7, mode);
    EXPECT_EQ(again.positions, s.positions);
    EXPECT_NE(sample_initial(20000, 0.05, 0.5, 8, mode).positions, s.positions);
  }
}

TEST(Pif, ChargeIsConservedAndZeroModeVanishes) {
  PifSimulation sim(small_config());
  const double volume = std::pow(sim.config().length(), 3);
  EXPECT_NEAR(sim.total_charge(), -volume, 1e-12 * volume);
  for (int i = 0; i < 5; ++i) {
    sim.step();
    EXPECT_NEAR(sim.total_charge(), -volume, 1e-12 * volume);
    EXPECT_EQ(sim.state().rho_k(0, 0, 0), Complex(0.0));
    for (const auto& e : sim.state().e_k) EXPECT_EQ(e(0, 0, 0), Complex(0.0));
  }
}

TEST(Pif, DepositedChargeMatchesParticleSum) {
  PifSimulation sim(small_config());
  sim.diagnose();
  // The first harmonic carries the perturbation: |rho_1| ~ alpha L^3 / 2.
  const double volume = std::pow(sim.config().length(), 3);
  EXPECT_NEAR(std::abs(sim.state().rho_k(1, 0, 0)), 0.025 * volume, 0.01 * volume);
}

TEST(Pif, EnergyAndMomentumAreNearlyConserved) {
  auto c = small_config();
  c.steps = 40;
  PifSimulation sim(c);
  const auto series = sim.run();
  ASSERT_EQ(series.size(), 41u);
  const double e0 = series.front().field_energy + series.front().kinetic_energy;
  for (const auto& d : series) {
    EXPECT_NEAR(d.field_energy + d.kinetic_energy, e0, 2e-3 * e0) << d.step;
    EXPECT_NEAR(d.t, d.step * c.dt, 1e-12);
    EXPECT_LE(d.mode_energy, d.field_energy);
  }
}

TEST(Pif, UnperturbedPlasmaStaysAtNoiseFloor) {
  auto c = small_config();
  c.alpha = 0.0;
  c.steps = 10;
  PifSimulation weak(c);
  c.alpha = 0.05;
  PifSimulation perturbed(c);
  const double signal = perturbed.diagnose().mode_energy;
  for (const auto& d : weak.run()) EXPECT_LT(d.mode_energy, 0.2 * signal) << d.step;
}

TEST(Pif, NoiseFloorDropsWithMoreParticles) {
  auto c = small_config();
  c.alpha = 0.0;
  c.sampling = SamplingMode::Random;
  double prev = 0.0;
  for (double rho : {2.0, 8.0, 32.0}) {
    c.density = rho;
    double mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      c.seed = seed;
      PifSimulation sim(c);
      mean += sim.diagnose().field_energy / 4;
    }
    if (prev > 0.0) EXPECT_LT(mean, 0.5 * prev) << rho;
    prev = mean;
  }
}

TEST(Pif, ResultsIndependentOfFftStrategyAndRanks) {
  auto c = small_config();
  c.steps = 4;
  PifSimulation base(c);
  const auto ref_series = base.run();
  std::vector<PlanOptions> options(3);
  options[0].fft = FftStrategy::Pruned;
  options[1].ranks = RankGrid{{2, 1, 2}};
  options[1].interp = InterpOrdering::Bin;
  options[2].spread.algorithm = SpreadAlgorithm::GridParallel;
  options[2].interp = InterpOrdering::Morton;
  for (const auto& o : options) {
    auto cc = c;
    cc.plan = o;
    PifSimulation sim(cc);
    const auto s = sim.run();
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(s[i].field_energy, ref_series[i].field_energy, 1e-10 * ref_series[i].field_energy);
      EXPECT_NEAR(s[i].kinetic_energy, ref_series[i].kinetic_energy, 1e-10 * ref_series[i].kinetic_energy);
    }
    for (std::size_t j = 0; j < sim.state().positions.size(); j += 97)
      for (int a = 0; a < 3; ++a)
        EXPECT_NEAR(sim.state().positions[j][a], base.state().positions[j][a], 1e-10);
  }
}

TEST(Pif, DampingFitRecoversRate) {
  const auto s = synthetic(-0.15, 1.4, 0.01, 2000);
  const auto fit = fit_damping(s);
  EXPECT_NEAR(fit.gamma, -0.15, 1e-3);
  EXPECT_LT(fit.gamma_stderr, 1e-3);
  EXPECT_GE(fit.peak_times.size(), 8u);
  for (double t : fit.peak_times) EXPECT_LE(t, 20.0);
  const auto total = fit_damping(s, 0.0, 20.0, EnergySeries::Total);
  EXPECT_GT(total.gamma, -0.15);
  EXPECT_THROW(fit_damping(synthetic(-0.1, 0.1, 0.01, 100)), Error);
}

TEST(Pif, ConfigParsing) {
  std::istringstream in(
      "# comment\nmodes = 16\ndensity = 2.5\nalpha = 0.1\nk = 0.4\neps = 1e-6\ndt = 0.02\n"
      "steps = 7\nseed = 9\nsampling = random\nsort_interval = 0\nvariant = tiled\n"
      "interp = bin\nfft = pruned\nnconc = 2\nranks = 2,1,1\nthreads = 1\ndeterministic = true\n");
  const auto c = parse_pif_config(in);
  EXPECT_EQ(c.modes, 16);
  EXPECT_DOUBLE_EQ(c.density, 2.5);
  EXPECT_DOUBLE_EQ(c.alpha, 0.1);
  EXPECT_DOUBLE_EQ(c.k, 0.4);
  EXPECT_DOUBLE_EQ(c.eps, 1e-6);
  EXPECT_DOUBLE_EQ(c.dt, 0.02);
  EXPECT_EQ(c.steps, 7);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.sampling, SamplingMode::Random);
  EXPECT_EQ(c.sort_interval, 0);
  EXPECT_EQ(c.plan.spread.algorithm, SpreadAlgorithm::Tiled);
  EXPECT_EQ(c.plan.interp, InterpOrdering::Bin);
  EXPECT_EQ(c.plan.fft, FftStrategy::Pruned);
  EXPECT_EQ(c.plan.n_conc, 2);
  EXPECT_EQ(c.plan.ranks, (RankGrid{{2, 1, 1}}));
  EXPECT_EQ(c.plan.exec.threads, 1);
  EXPECT_TRUE(c.plan.exec.deterministic);
  EXPECT_EQ(c.particles(), 10240u);
  std::istringstream bad("colour = blue\n");
  EXPECT_THROW(parse_pif_config(bad), Error);
  PifConfig d;
  EXPECT_THROW(set_pif_option(d, "modes", "seven"), Error);
  d.modes = 7;
  EXPECT_THROW(d.validate(), Error);
}

TEST(Pif, DiagnosticsCsv) {
  auto s = synthetic(-0.1, 1.0, 0.5, 2);
  std::ostringstream out;
  write_diagnostics_csv(out, s);
  std::istringstream lines(out.str());
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, kPifCsvHeader);
  int rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
  }
  EXPECT_EQ(rows, 3);
}

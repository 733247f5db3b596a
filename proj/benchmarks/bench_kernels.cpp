#include <benchmark/benchmark.h>

#include <numbers>
#include <random>
#include <vector>

#include "dnufft/interp.hpp"
#include "dnufft/pipeline.hpp"
#include "dnufft/specfft.hpp"
#include "dnufft/spread.hpp"

using namespace dnufft;

namespace {

constexpr double kLength = 2.0 * std::numbers::pi;

ParticleSet make_particles(int dim, std::size_t count) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.0, kLength);
  std::uniform_real_distribution<double> val(-0.5, 0.5);
  std::vector<Vec3> x(count, Vec3{0.0, 0.0, 0.0});
  std::vector<Complex> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (int a = 0; a < dim; ++a) x[i][a] = pos(rng);
    f[i] = {val(rng), val(rng)};
  }
  return ParticleSet(dim, kLength, std::move(x), std::move(f));
}

ModeArray make_modes(int dim, int n) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> val(-0.5, 0.5);
  ModeArray m(dim, n);
  for (auto& v : m.values()) v = {val(rng), val(rng)};
  return m;
}

std::size_t count_for(int n, double density) {
  return static_cast<std::size_t>(density * n * n * n);
}

void BM_WindowEval(benchmark::State& state) {
  std::vector<double> z(4096);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = -1.0 + 2.0 * i / z.size();
  std::vector<double> buf(z.size());
  for (auto _ : state) {
    buf = z;
    es_eval_inplace(buf.data(), buf.size(), 11.5);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(z.size()));
}
BENCHMARK(BM_WindowEval);

// args: algorithm, tolerance exponent
void BM_Spread(benchmark::State& state) {
  const int n = 32;
  const auto alg = static_cast<SpreadAlgorithm>(state.range(0));
  const auto spec = select_params(std::pow(10.0, -static_cast<double>(state.range(1))), 3);
  const auto ps = make_particles(3, count_for(n, 1.0));
  auto grid = OversampledGrid::global(3, n, kLength, spec.halo_width());
  for (auto _ : state) {
    grid.clear();
    spread(ps, spec, grid, SpreadVariant{alg});
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
  state.SetLabel(to_string(alg));
}
BENCHMARK(BM_Spread)->ArgsProduct({{0, 1, 2}, {4, 8}})->Unit(benchmark::kMillisecond);

void BM_Interp(benchmark::State& state) {
  const int n = 32;
  const auto ordering = static_cast<InterpOrdering>(state.range(0));
  const auto spec = select_params(std::pow(10.0, -static_cast<double>(state.range(1))), 3);
  const auto ps = make_particles(3, count_for(n, 1.0));
  auto grid = OversampledGrid::global(3, n, kLength, spec.halo_width());
  const auto modes = make_modes(3, 2 * n);
  grid.set_owned_values(modes.values());
  fill_halo_periodic(grid);
  for (auto _ : state) benchmark::DoNotOptimize(interpolate(grid, ps, spec, ordering));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
  state.SetLabel(to_string(ordering));
}
BENCHMARK(BM_Interp)->ArgsProduct({{0, 1, 2}, {4, 8}})->Unit(benchmark::kMillisecond);

void BM_FullForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto x = make_modes(3, 2 * n);
  for (auto _ : state)
    benchmark::DoNotOptimize(truncate_modes(fft_forward(x.values(), 3, 2 * n), 3, 2 * n, n));
}
BENCHMARK(BM_FullForward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PrunedForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto x = make_modes(3, 2 * n);
  PrunedPlan plan(3, 2 * n, n, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(plan.forward(x.values()));
}
BENCHMARK(BM_PrunedForward)->ArgsProduct({{16, 32}, {1, 4}})->Unit(benchmark::kMillisecond);

void BM_Type1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto ps = make_particles(3, count_for(n, 1.0));
  NufftPlan plan(3, n, kLength, 1e-4);
  for (auto _ : state) benchmark::DoNotOptimize(plan.type1(ps));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
}
BENCHMARK(BM_Type1)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Type2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto ps = make_particles(3, count_for(n, 1.0));
  const auto modes = make_modes(3, n);
  PlanOptions o;
  o.interp = InterpOrdering::Morton;
  NufftPlan plan(3, n, kLength, 1e-4, o);
  for (auto _ : state) benchmark::DoNotOptimize(plan.type2(modes, ps));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
}
BENCHMARK(BM_Type2)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

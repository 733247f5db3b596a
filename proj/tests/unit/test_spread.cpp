#include <gtest/gtest.h>

#include "dnufft/error.hpp"
#include "dnufft/spread.hpp"
#include "reference.hpp"

using namespace dnufft;

namespace {

std::vector<SpreadVariant> all_variants() {
  std::vector<SpreadVariant> v;
  v.push_back({SpreadAlgorithm::Atomic});
  for (auto tile : {std::array<int, 3>{4, 4, 4}, std::array<int, 3>{8, 8, 4}}) {
    v.push_back({SpreadAlgorithm::Tiled, tile, 4, 0});
    for (int team : {1, 3, 8}) v.push_back({SpreadAlgorithm::GridParallel, tile, team, 0});
    v.push_back({SpreadAlgorithm::GridParallel, tile, 2, 1});
  }
  return v;
}

std::vector<Complex> run(const ParticleSet& ps, const WindowSpec& spec, int modes,
                         const SpreadVariant& variant, const Execution& exec = {}) {
  auto g = OversampledGrid::global(ps.dim(), modes, ps.length(), spec.halo_width());
  spread(ps, spec, g, variant, exec);
  return g.owned_values();
}

}  // namespace

class SpreadDims : public ::testing::TestWithParam<int> {};

TEST_P(SpreadDims, MatchesDenseApplication) {
  const int dim = GetParam();
  const int modes = dim == 3 ? 4 : 8;
  for (int w : {3, 4, 7}) {
    const auto spec = window_for_width(w, dim);
    auto ps = ref::particles(dim, 3.0, 60, 100 + w);
    const auto expect = ref::dense_spread(ps, spec.beta, w, 2 * modes);
    for (const auto& v : all_variants()) {
      const auto got = run(ps, spec, modes, v);
      EXPECT_LT(ref::rel_diff(got, expect), 1e-14) << to_string(v.algorithm) << " w=" << w;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, SpreadDims, ::testing::Values(1, 2, 3));

TEST(Spread, VariantsAgreeOnLargerProblem) {
  const auto spec = window_for_width(7, 3);
  auto ps = ref::particles(3, 1.0, 20000, 9);
  const auto base = run(ps, spec, 16, {SpreadAlgorithm::Atomic});
  for (const auto& v : all_variants())
    EXPECT_LT(ref::rel_diff(run(ps, spec, 16, v), base), 1e-13) << to_string(v.algorithm);
}

TEST(Spread, DeterministicModeIsBitIdentical) {
  const auto spec = window_for_width(5, 3);
  auto ps = ref::particles(3, 1.0, 5000, 4);
  for (auto alg : {SpreadAlgorithm::Atomic, SpreadAlgorithm::Tiled, SpreadAlgorithm::GridParallel}) {
    const auto a = run(ps, spec, 8, {alg}, Execution::serial());
    const auto b = run(ps, spec, 8, {alg}, Execution::serial());
    EXPECT_EQ(a, b) << to_string(alg);
  }
}

TEST(Spread, HaloIsZeroAfterPeriodicFold) {
  const auto spec = window_for_width(5, 2);
  auto ps = ref::particles(2, 1.0, 300, 2);
  auto g = OversampledGrid::global(2, 8, 1.0, spec.halo_width());
  spread(ps, spec, g, {SpreadAlgorithm::Tiled});
  EXPECT_EQ(g.at(-1, 3), Complex(0.0));
  EXPECT_EQ(g.at(16, 16), Complex(0.0));
}

TEST(Spread, SpreadIntoHaloKeepsContributions) {
  const auto spec = window_for_width(5, 1);
  ParticleSet ps(1, 1.0, {Vec3{0.01, 0, 0}}, std::vector<Complex>{1.0});
  auto g = OversampledGrid::global(1, 8, 1.0, spec.halo_width());
  spread_into_halo(ps, spec, g, {SpreadAlgorithm::Atomic});
  EXPECT_GT(std::abs(g.at(-1)), 0.0);
  EXPECT_EQ(g.at(15), Complex(0.0));
}

TEST(Spread, NamesRoundTrip) {
  for (auto alg : {SpreadAlgorithm::Atomic, SpreadAlgorithm::Tiled, SpreadAlgorithm::GridParallel})
    EXPECT_EQ(parse_spread_algorithm(to_string(alg)), alg);
  EXPECT_THROW(parse_spread_algorithm("bogus"), Error);
}

TEST(Spread, RejectsInvalidTeam) {
  const auto spec = window_for_width(5, 1);
  auto ps = ref::particles(1, 1.0, 10, 1);
  auto g = OversampledGrid::global(1, 8, 1.0, spec.halo_width());
  SpreadVariant v{SpreadAlgorithm::GridParallel};
  v.team_size = 0;
  EXPECT_THROW(spread(ps, spec, g, v), Error);
}

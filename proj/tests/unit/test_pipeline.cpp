#include <gtest/gtest.h>

#include <numbers>

#include "dnufft/error.hpp"
#include "dnufft/oracle.hpp"
#include "dnufft/pipeline.hpp"
#include "reference.hpp"

using namespace dnufft;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<PlanOptions> option_grid() {
  std::vector<PlanOptions> out;
  for (auto alg : {SpreadAlgorithm::Atomic, SpreadAlgorithm::Tiled, SpreadAlgorithm::GridParallel})
    for (auto o : {InterpOrdering::Direct, InterpOrdering::Morton, InterpOrdering::Bin})
      for (auto fft : {FftStrategy::Full, FftStrategy::Pruned}) {
        PlanOptions p;
        p.spread.algorithm = alg;
        p.interp = o;
        p.fft = fft;
        out.push_back(p);
      }
  return out;
}

}  // namespace

class PipelineAccuracy : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(PipelineAccuracy, MatchesDirectSums) {
  const auto [dim, eps] = GetParam();
  const int n = dim == 3 ? 8 : 16;
  auto ps = ref::particles(dim, kTwoPi, 500, 12);
  const auto c = ref::modes(dim, n, 13);
  NufftPlan plan(dim, n, kTwoPi, eps);
  const auto exact1 = oracle::nudft_type1(ps, n);
  const auto exact2 = oracle::nudft_type2(c, ps);
  EXPECT_LE(ref::rel_diff(plan.type1(ps).values(), exact1.values()), 10 * eps);
  EXPECT_LE(ref::rel_diff(plan.type2(c, ps), exact2), 10 * eps);
}

INSTANTIATE_TEST_SUITE_P(DimsAndTolerances, PipelineAccuracy,
                         ::testing::Combine(::testing::Values(1, 2, 3),
                                            ::testing::Values(1e-2, 1e-4, 1e-6, 1e-8)));

TEST(Pipeline, ErrorDecreasesWithWidth) {
  auto ps = ref::particles(1, kTwoPi, 300, 2);
  const auto exact = oracle::nudft_type1(ps, 32);
  double prev = 1.0;
  for (int w = 3; w <= 13; w += 2) {
    NufftPlan plan(1, 32, kTwoPi, window_for_width(w, 1));
    const double err = ref::rel_diff(plan.type1(ps).values(), exact.values());
    EXPECT_LT(err, prev) << w;
    prev = err;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(Pipeline, OptionsDoNotChangeResults) {
  auto ps = ref::particles(3, 3.0, 4000, 8);
  const auto c = ref::modes(3, 16, 9);
  NufftPlan base(3, 16, 3.0, 1e-6);
  const auto r1 = base.type1(ps);
  const auto r2 = base.type2(c, ps);
  for (const auto& o : option_grid()) {
    NufftPlan plan(3, 16, 3.0, 1e-6, o);
    EXPECT_LT(ref::rel_diff(plan.type1(ps).values(), r1.values()), 1e-12);
    EXPECT_LT(ref::rel_diff(plan.type2(c, ps), r2), 1e-12);
  }
}

TEST(Pipeline, DecomposedMatchesSingleRank) {
  auto ps = ref::particles(3, 1.0, 3000, 17);
  const auto c = ref::modes(3, 8, 18);
  NufftPlan base(3, 8, 1.0, 1e-4);
  const auto r1 = base.type1(ps);
  const auto r2 = base.type2(c, ps);
  for (auto rg : {RankGrid{{2, 1, 1}}, RankGrid{{1, 2, 2}}, RankGrid{{2, 2, 2}}}) {
    for (auto fft : {FftStrategy::Full, FftStrategy::Pruned}) {
      PlanOptions o;
      o.ranks = rg;
      o.fft = fft;
      o.interp = InterpOrdering::Morton;
      NufftPlan plan(3, 8, 1.0, 1e-4, o);
      ASSERT_NE(plan.decomposition(), nullptr);
      EXPECT_LT(ref::rel_diff(plan.type1(ps).values(), r1.values()), 1e-12) << to_string(rg);
      EXPECT_LT(ref::rel_diff(plan.type2(c, ps), r2), 1e-12) << to_string(rg);
      EXPECT_GT(plan.traffic().messages, 0u);
    }
  }
  EXPECT_EQ(base.decomposition(), nullptr);
  EXPECT_EQ(base.traffic().messages, 0u);
}

TEST(Pipeline, Type2ManyMatchesSeparateCalls) {
  auto ps = ref::particles(3, 1.0, 1000, 4);
  const std::vector<ModeArray> fields{ref::modes(3, 8, 1), ref::modes(3, 8, 2), ref::modes(3, 8, 3)};
  PlanOptions o;
  o.interp = InterpOrdering::Bin;
  NufftPlan plan(3, 8, 1.0, 1e-6, o);
  const auto many = plan.type2_many(fields, ps);
  ASSERT_EQ(many.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(ref::rel_diff(many[k], plan.type2(fields[k], ps)), 1e-15);
}

TEST(Pipeline, PlanTransformsAreAdjoint) {
  auto ps = ref::particles(2, 2.0, 800, 5);
  const auto c = ref::modes(2, 16, 6);
  NufftPlan plan(2, 16, 2.0, 1e-8);
  const auto lhs = ref::inner(c.values(), plan.type1(ps).values());
  const auto rhs = ref::inner(plan.type2(c, ps), ps.strengths());
  EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-12);
}

TEST(Pipeline, StageTimesAddUp) {
  auto ps = ref::particles(3, 1.0, 2000, 2);
  NufftPlan plan(3, 16, 1.0, 1e-4);
  const auto t1 = timing_breakdown(plan, ps);
  EXPECT_GT(t1.spread_interp, 0.0);
  EXPECT_GT(t1.fft, 0.0);
  EXPECT_LE(t1.stage_sum(), t1.total * 1.0001);
  const auto t2 = timing_breakdown(plan, ref::modes(3, 16, 3), ps);
  EXPECT_GT(t2.spread_interp, 0.0);
  EXPECT_LE(t2.stage_sum(), t2.total * 1.0001);
}

TEST(Pipeline, DeterministicRunsAreBitIdentical) {
  auto ps = ref::particles(3, 1.0, 3000, 21);
  PlanOptions o;
  o.spread.algorithm = SpreadAlgorithm::GridParallel;
  o.exec = Execution::serial();
  NufftPlan plan(3, 8, 1.0, 1e-6, o);
  const auto a = plan.type1(ps);
  const auto b = plan.type1(ps);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.values()[i], b.values()[i]);
}

TEST(Pipeline, RejectsMismatchedInputs) {
  NufftPlan plan(3, 8, 1.0, 1e-4);
  EXPECT_THROW(plan.type1(ref::particles(2, 1.0, 10, 1)), Error);
  EXPECT_THROW(plan.type2(ref::modes(3, 4, 1), ref::particles(3, 1.0, 10, 1)), Error);
  EXPECT_THROW(NufftPlan(3, 8, 1.0, 1.0), Error);
  EXPECT_THROW(NufftPlan(3, 7, 1.0, 1e-4), Error);
  for (auto f : {FftStrategy::Full, FftStrategy::Pruned}) EXPECT_EQ(parse_fft_strategy(to_string(f)), f);
  EXPECT_THROW(parse_fft_strategy("halfway"), Error);
}

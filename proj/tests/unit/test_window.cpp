#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dnufft/error.hpp"
#include "dnufft/window.hpp"
#include "reference.hpp"

using namespace dnufft;

TEST(Window, MatchesHighPrecisionValues) {
  for (double beta : {6.9, 11.5, 20.7, 29.9}) {
    for (double z = -1.0; z <= 1.0; z += 0.0625) {
      const double expect = ref::es_window(z, beta);
      EXPECT_NEAR(es_eval(z, beta), expect, 1e-15 + 4e-15 * expect) << z << " " << beta;
    }
  }
}

TEST(Window, ZeroOutsideSupportAndOneAtCentre) {
  EXPECT_EQ(es_eval(1.0000001, 10.0), 0.0);
  EXPECT_EQ(es_eval(-1.5, 10.0), 0.0);
  EXPECT_DOUBLE_EQ(es_eval(0.0, 10.0), 1.0);
}

TEST(Window, BatchedEvaluationMatchesScalar) {
  std::vector<double> z;
  for (int i = 0; i <= 200; ++i) z.push_back(-1.2 + 2.4 * i / 200.0);
  auto batch = z;
  es_eval_inplace(batch.data(), batch.size(), 11.5);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double expect = ref::es_window(z[i], 11.5);
    EXPECT_NEAR(batch[i], expect, 1e-15 + 4e-15 * expect) << z[i];
  }
}

TEST(Window, WidthRule) {
  EXPECT_EQ(select_params(1e-1).width, 3);
  EXPECT_EQ(select_params(1e-2).width, 3);
  EXPECT_EQ(select_params(1e-4).width, 5);
  EXPECT_EQ(select_params(1e-6).width, 7);
  EXPECT_EQ(select_params(1e-8).width, 9);
  EXPECT_EQ(select_params(1e-12).width, 13);
  EXPECT_EQ(select_params(3e-5).width, 6);
  const auto s = select_params(1e-6, 2);
  EXPECT_DOUBLE_EQ(s.beta, 2.30 * 7);
  EXPECT_EQ(s.sigma, 2.0);
  EXPECT_EQ(s.dim, 2);
  EXPECT_EQ(s.halo_width(), 4);
  EXPECT_EQ(window_for_width(4).halo_width(), 2);
}

TEST(Window, ToleranceOutOfRangeIsRejected) {
  for (double eps : {0.5, 1e-13, 0.0, -1e-3}) {
    try {
      select_params(eps);
      FAIL() << eps;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ToleranceOutOfRange);
    }
  }
}

TEST(Window, TransformMatchesAdaptiveQuadrature) {
  for (int w : {3, 5, 9, 13}) {
    const auto spec = window_for_width(w);
    for (double k : {0.0, 0.7, 2.0, 5.5, 0.5 * std::numbers::pi * w}) {
      const double expect = ref::es_transform(spec.beta, k);
      EXPECT_NEAR(phi_hat(spec, k), expect, 1e-13 * std::abs(ref::es_transform(spec.beta, 0.0)))
          << w << " " << k;
    }
  }
}

TEST(Window, GaussLegendreIntegratesPolynomials) {
  const auto& gl = gauss_legendre_64();
  ASSERT_EQ(gl.nodes.size(), 64u);
  double s0 = 0.0, s2 = 0.0, s126 = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    s0 += gl.weights[i];
    s2 += gl.weights[i] * gl.nodes[i] * gl.nodes[i];
    s126 += gl.weights[i] * std::pow(gl.nodes[i], 126);
  }
  EXPECT_NEAR(s0, 2.0, 1e-14);
  EXPECT_NEAR(s2, 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(s126, 2.0 / 127.0, 1e-14);
}

TEST(Window, DeconvolutionTableIsSymmetricAndMatchesDefinition) {
  const auto spec = select_params(1e-6, 1);
  const int n = 16;
  const auto table = build_deconv_table(spec, n, 32, 2.0 * std::numbers::pi);
  ASSERT_EQ(table.axis().size(), static_cast<std::size_t>(n));
  for (int k = -n / 2; k < n / 2; ++k) {
    const double expect =
        1.0 / (0.5 * spec.width * ref::es_transform(spec.beta, std::numbers::pi * k * spec.width / 32));
    EXPECT_NEAR(table.axis_factor(k), expect, 1e-12 * expect) << k;
    if (k > -n / 2) EXPECT_DOUBLE_EQ(table.axis_factor(k), table.axis_factor(-k));
  }
  const auto t3 = build_deconv_table(select_params(1e-6, 3), n, 32, 1.0);
  EXPECT_NEAR(t3.factor(1, -2, 3), t3.axis_factor(1) * t3.axis_factor(-2) * t3.axis_factor(3),
              1e-14 * t3.factor(1, -2, 3));
}

TEST(Window, DeconvolutionRejectsWrongFineGrid) {
  EXPECT_THROW(build_deconv_table(select_params(1e-4), 16, 30, 1.0), Error);
}

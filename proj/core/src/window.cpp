#include "dnufft/window.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dnufft/error.hpp"

namespace dnufft {

double es_eval(double z, double beta) noexcept {
  if (std::abs(z) > 1.0) return 0.0;
  return std::exp(beta * (std::sqrt(1.0 - z * z) - 1.0));
}

WindowSpec select_params(double eps, int dim) {
  require(eps >= kMinTolerance && eps <= kMaxTolerance,
          ErrorCode::ToleranceOutOfRange,
          "tolerance " + std::to_string(eps) + " outside [1e-12, 1e-1]");
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dim must be 1, 2 or 3");
  // The small offset keeps exact decades (1e-4 -> 4) from rounding up.
  int width = static_cast<int>(std::ceil(-std::log10(eps) - 1e-9)) + 1;
  if (width < kMinSelectedWidth) width = kMinSelectedWidth;
  if (width > kMaxSelectedWidth) width = kMaxSelectedWidth;
  WindowSpec spec = window_for_width(width, dim);
  spec.tolerance = eps;
  return spec;
}

WindowSpec window_for_width(int width, int dim) {
  require(width >= kMinWidth && width <= kMaxWidth, ErrorCode::InvalidArgument,
          "window width " + std::to_string(width) + " unsupported");
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dim must be 1, 2 or 3");
  WindowSpec spec;
  spec.width = width;
  spec.beta = kBetaPerWidth * width;
  spec.sigma = 2.0;
  spec.tolerance = std::pow(10.0, -(width - 1));
  spec.dim = dim;
  return spec;
}

GaussLegendre gauss_legendre(int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "quadrature order must be positive");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendre& gauss_legendre_64() {
  static const GaussLegendre rule = gauss_legendre(64);
  return rule;
}

double phi_hat(double beta, double k) {
  require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be non-negative");
  // z = sin(theta), theta = (pi/2) t with t in [-1, 1].
  const auto& rule = gauss_legendre_64();
  const double half_pi = 0.5 * std::numbers::pi;
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    double theta = half_pi * rule.nodes[q];
    double c = std::cos(theta);
    double z = std::sin(theta);
    sum += rule.weights[q] * std::exp(beta * (c - 1.0)) * std::cos(k * z) * c;
  }
  return half_pi * sum;
}

double phi_hat(const WindowSpec& spec, double k) { return phi_hat(spec.beta, k); }

DeconvTable::DeconvTable(int dim, int modes, std::vector<double> axis)
    : dim_(dim), modes_(modes), axis_(std::move(axis)) {}

double DeconvTable::axis_factor(int n) const {
  int idx = n < 0 ? n + modes_ : n;
  return axis_[static_cast<std::size_t>(idx)];
}

double DeconvTable::factor(int n1, int n2, int n3) const {
  double f = axis_factor(n1);
  if (dim_ >= 2) f *= axis_factor(n2);
  if (dim_ >= 3) f *= axis_factor(n3);
  return f;
}

DeconvTable build_deconv_table(const WindowSpec& spec, int modes, int fine,
                               double length) {
  require(modes >= 2 && modes % 2 == 0, ErrorCode::InvalidArgument,
          "mode count must be even and >= 2");
  require(length > 0.0, ErrorCode::InvalidArgument, "domain length must be positive");
  require(std::abs(fine - spec.sigma * modes) < 0.5, ErrorCode::InvalidArgument,
          "fine grid must equal sigma * modes");
  const double half_w = 0.5 * spec.width;
  const double peak = phi_hat(spec, 0.0);
  std::vector<double> axis(static_cast<std::size_t>(modes));
  for (int i = 0; i < modes; ++i) {
    int n = i < modes / 2 ? i : i - modes;
    double arg = std::numbers::pi * n * spec.width / fine;
    double ph = phi_hat(spec, arg);
    require(ph > 1e-14 * peak, ErrorCode::DeconvolutionUnstable,
            "window transform vanishes on the retained band (n=" + std::to_string(n) + ")");
    axis[static_cast<std::size_t>(i)] = 1.0 / (half_w * ph);
  }
  return DeconvTable(spec.dim, modes, std::move(axis));
}

}  // namespace dnufft

#pragma once

#include <vector>

#include "dnufft/types.hpp"

namespace dnufft {

/// Exponential-of-semicircle window parameters. `width` is the stencil width
/// in fine-grid points, `beta` the shape parameter and `sigma` the
/// oversampling factor between the fine grid and the retained modes.
struct WindowSpec {
  int width = 0;
  double beta = 0.0;
  double sigma = 2.0;
  double tolerance = 0.0;
  int dim = 3;

  int halo_width() const { return (width + 1) / 2; }
  bool operator==(const WindowSpec&) const = default;
};

inline constexpr double kMinTolerance = 1e-12;
inline constexpr double kMaxTolerance = 1e-1;
inline constexpr int kMinSelectedWidth = 3;
inline constexpr int kMaxSelectedWidth = 13;
inline constexpr double kBetaPerWidth = 2.30;

// phi(z) = exp(beta * (sqrt(1 - z^2) - 1)) on |z| <= 1, zero outside.
double es_eval(double z, double beta) noexcept;
/// Replaces every z[i] by es_eval(z[i], beta); vectorized.
void es_eval_inplace(double* z, std::size_t count, double beta) noexcept;

/// Chooses (w, beta) for sigma = 2 from the requested tolerance:
/// w = ceil(log10(1/eps)) + 1 clamped to [3, 13], beta = 2.30 w.
WindowSpec select_params(double eps, int dim = 3);

/// Window with an explicit width, used by tests and width sweeps.
WindowSpec window_for_width(int width, int dim = 3);

/// Integral of phi(z) cos(k z) over [-1, 1]. Computed with 64-point
/// Gauss-Legendre after the substitution z = sin(theta), which removes the
/// square-root endpoint behaviour of the window.
double phi_hat(double beta, double k);
double phi_hat(const WindowSpec& spec, double k);

/// Per-axis deconvolution factors over the retained modes, stored in FFT
/// order (n = 0, 1, ..., N/2-1, -N/2, ..., -1). The factor for a mode
/// (n1, n2, n3) is the product of the axis entries.
class DeconvTable {
 public:
  DeconvTable() = default;
  DeconvTable(int dim, int modes, std::vector<double> axis);

  int dim() const { return dim_; }
  int modes() const { return modes_; }
  const std::vector<double>& axis() const { return axis_; }

  /// Factor for signed frequency n in [-N/2, N/2).
  double axis_factor(int n) const;
  double factor(int n1, int n2 = 0, int n3 = 0) const;

 private:
  int dim_ = 0;
  int modes_ = 0;
  std::vector<double> axis_;
};

/// Builds the table so that spread -> FFT -> truncate -> deconvolve
/// reproduces the direct sum  f_k = sum_j f_j exp(-i k x_j)  (and the
/// mirrored Type 2 chain reproduces its adjoint). Both FFT directions are
/// unnormalized, so d(n) = 1 / ((w/2) phi_hat(pi n w / M)); the domain length
/// cancels out.
DeconvTable build_deconv_table(const WindowSpec& spec, int modes, int fine,
                               double length);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre_64();
GaussLegendre gauss_legendre(int n);

}  // namespace dnufft

#include "dnufft/oracle.hpp"

#include <cmath>
#include <numbers>

#include "dnufft/error.hpp"

namespace dnufft::oracle {

namespace {

void check_cost(std::uint64_t modes_total, std::uint64_t particles, std::uint64_t cap) {
  require(particles == 0 || modes_total <= cap / particles, ErrorCode::CostCapExceeded,
          "direct sum would exceed the oracle cost cap");
}

std::uint64_t mode_count(int modes, int dim) {
  std::uint64_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::uint64_t>(modes);
  return n;
}

// Phases exp(sign * i * (2 pi / L) n x) for n = -N/2 .. N/2-1, stored in FFT
// order to match ModeArray.
void axis_phases(double x, double length, int modes, int sign, std::vector<Complex>& out) {
  out.resize(static_cast<std::size_t>(modes));
  const double kx = 2.0 * std::numbers::pi / length * x;
  for (int i = 0; i < modes; ++i) {
    const int n = ModeArray::frequency(i, modes);
    out[static_cast<std::size_t>(i)] = std::polar(1.0, sign * kx * n);
  }
}

}  // namespace

ModeArray nudft_type1(const ParticleSet& ps, int modes, std::uint64_t cost_cap) {
  const int dim = ps.dim();
  check_cost(mode_count(modes, dim), ps.size(), cost_cap);
  ModeArray out(dim, modes);
  auto f = out.values();
  const int n1 = dim >= 2 ? modes : 1;
  const int n2 = dim >= 3 ? modes : 1;
  std::vector<Complex> px, py, pz;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const auto& x = ps.positions()[j];
    axis_phases(x[0], ps.length(), modes, -1, px);
    if (dim >= 2) axis_phases(x[1], ps.length(), modes, -1, py); else py.assign(1, Complex(1.0));
    if (dim >= 3) axis_phases(x[2], ps.length(), modes, -1, pz); else pz.assign(1, Complex(1.0));
    const Complex s = ps.strengths()[j];
    std::size_t k = 0;
    for (int i2 = 0; i2 < n2; ++i2) {
      const Complex sz = s * pz[static_cast<std::size_t>(i2)];
      for (int i1 = 0; i1 < n1; ++i1) {
        const Complex szy = sz * py[static_cast<std::size_t>(i1)];
        for (int i0 = 0; i0 < modes; ++i0) f[k++] += szy * px[static_cast<std::size_t>(i0)];
      }
    }
  }
  return out;
}

std::vector<Complex> nudft_type2(const ModeArray& modes, const ParticleSet& positions,
                                 std::uint64_t cost_cap) {
  const int dim = modes.dim();
  const int n = modes.modes();
  require(positions.dim() == dim, ErrorCode::InvalidArgument, "dimension mismatch");
  check_cost(mode_count(n, dim), positions.size(), cost_cap);
  const int n1 = dim >= 2 ? n : 1;
  const int n2 = dim >= 3 ? n : 1;
  const auto c = modes.values();
  std::vector<Complex> out(positions.size());
  std::vector<Complex> px, py, pz;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    const auto& x = positions.positions()[j];
    axis_phases(x[0], positions.length(), n, +1, px);
    if (dim >= 2) axis_phases(x[1], positions.length(), n, +1, py); else py.assign(1, Complex(1.0));
    if (dim >= 3) axis_phases(x[2], positions.length(), n, +1, pz); else pz.assign(1, Complex(1.0));
    Complex acc{};
    std::size_t k = 0;
    for (int i2 = 0; i2 < n2; ++i2) {
      Complex acc_z{};
      for (int i1 = 0; i1 < n1; ++i1) {
        Complex acc_y{};
        for (int i0 = 0; i0 < n; ++i0) acc_y += c[k++] * px[static_cast<std::size_t>(i0)];
        acc_z += acc_y * py[static_cast<std::size_t>(i1)];
      }
      acc += acc_z * pz[static_cast<std::size_t>(i2)];
    }
    out[j] = acc;
  }
  return out;
}

namespace {

// (index, weight) pairs of one axis found by scanning every index.
std::vector<std::pair<int, double>> dense_axis_weights(double x, double length, int fine,
                                                       const WindowSpec& spec) {
  std::vector<std::pair<int, double>> out;
  const double u = x * fine / length;
  const double half = 0.5 * spec.width;
  // Every periodic image counts, so stencils wider than the grid still work.
  const int images = spec.width / fine + 2;
  for (int i = 0; i < fine; ++i)
    for (int s = -images; s <= images; ++s) {
      const double d = u - i + static_cast<double>(s) * fine;
      if (d > -half && d <= half) out.emplace_back(i, es_eval(d / half, spec.beta));
    }
  return out;
}

}  // namespace

std::vector<Complex> dense_spread_reference(const ParticleSet& ps, const WindowSpec& spec,
                                            int modes) {
  const int dim = ps.dim();
  const int fine = 2 * modes;
  const auto m = static_cast<std::size_t>(fine);
  std::vector<Complex> grid(static_cast<std::size_t>(mode_count(fine, dim)));
  const std::vector<std::pair<int, double>> unit{{0, 1.0}};
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const auto& x = ps.positions()[j];
    auto wx = dense_axis_weights(x[0], ps.length(), fine, spec);
    auto wy = dim >= 2 ? dense_axis_weights(x[1], ps.length(), fine, spec) : unit;
    auto wz = dim >= 3 ? dense_axis_weights(x[2], ps.length(), fine, spec) : unit;
    for (const auto& [iz, vz] : wz)
      for (const auto& [iy, vy] : wy)
        for (const auto& [ix, vx] : wx)
          grid[static_cast<std::size_t>(ix) + m * (static_cast<std::size_t>(iy) + m * static_cast<std::size_t>(iz))] +=
              ps.strengths()[j] * (vx * vy * vz);
  }
  return grid;
}

std::vector<Complex> dense_interp_reference(std::span<const Complex> fine_values,
                                            const ParticleSet& ps, const WindowSpec& spec,
                                            int modes) {
  const int dim = ps.dim();
  const int fine = 2 * modes;
  const auto m = static_cast<std::size_t>(fine);
  require(fine_values.size() == mode_count(fine, dim), ErrorCode::InvalidArgument,
          "grid size mismatch");
  std::vector<Complex> out(ps.size());
  const std::vector<std::pair<int, double>> unit{{0, 1.0}};
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const auto& x = ps.positions()[j];
    auto wx = dense_axis_weights(x[0], ps.length(), fine, spec);
    auto wy = dim >= 2 ? dense_axis_weights(x[1], ps.length(), fine, spec) : unit;
    auto wz = dim >= 3 ? dense_axis_weights(x[2], ps.length(), fine, spec) : unit;
    Complex acc{};
    for (const auto& [iz, vz] : wz)
      for (const auto& [iy, vy] : wy)
        for (const auto& [ix, vx] : wx)
          acc += fine_values[static_cast<std::size_t>(ix) + m * (static_cast<std::size_t>(iy) + m * static_cast<std::size_t>(iz))] *
                 (vx * vy * vz);
    out[j] = acc;
  }
  return out;
}

std::vector<Complex> direct_dft(std::span<const Complex> values, int dim, int fine, int sign) {
  const auto total = static_cast<std::size_t>(mode_count(fine, dim));
  require(values.size() == total, ErrorCode::InvalidArgument, "DFT input size mismatch");
  const auto m = static_cast<std::size_t>(fine);
  std::vector<Complex> roots(m);
  for (std::size_t i = 0; i < m; ++i)
    roots[i] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(i) / fine);
  auto coord = [&](std::size_t idx, int a) {
    for (int b = 0; b < a; ++b) idx /= m;
    return idx % m;
  };
  std::vector<Complex> out(total);
  for (std::size_t k = 0; k < total; ++k) {
    Complex acc{};
    for (std::size_t x = 0; x < total; ++x) {
      std::size_t phase = 0;
      for (int a = 0; a < dim; ++a) phase += coord(k, a) * coord(x, a);
      acc += values[x] * roots[phase % m];
    }
    out[k] = acc;
  }
  return out;
}

std::complex<double> plasma_dispersion(std::complex<double> zeta) {
  // Z(zeta) = i sqrt(pi) exp(-zeta^2) - 2 zeta sum_n (-2 zeta^2)^n / (2n+1)!!
  // The series is entire; terms are summed until they stop contributing.
  using C = std::complex<double>;
  const C z2 = zeta * zeta;
  C term(1.0);
  C sum(1.0);
  for (int n = 1; n < 400; ++n) {
    term *= -2.0 * z2 / (2.0 * n + 1.0);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return C(0.0, std::sqrt(std::numbers::pi)) * std::exp(-z2) - 2.0 * zeta * sum;
}

std::complex<double> landau_root(double k) {
  using C = std::complex<double>;
  require(k > 0.0, ErrorCode::InvalidArgument, "wavenumber must be positive");
  auto dispersion = [k](C omega) {
    const C zeta = omega / (k * std::sqrt(2.0));
    return 1.0 + (1.0 + zeta * plasma_dispersion(zeta)) / (k * k);
  };
  // Start from the Bohm-Gross frequency with a small damping guess, then
  // secant iterations.
  C w0(std::sqrt(1.0 + 3.0 * k * k), -0.05);
  C w1 = w0 * C(1.01, 0.0) + C(0.0, -0.01);
  C f0 = dispersion(w0);
  C f1 = dispersion(w1);
  for (int it = 0; it < 200 && std::abs(w1 - w0) > 1e-15 * std::abs(w1); ++it) {
    const C w2 = w1 - f1 * (w1 - w0) / (f1 - f0);
    w0 = w1;
    f0 = f1;
    w1 = w2;
    f1 = dispersion(w1);
  }
  return w1;
}

}  // namespace dnufft::oracle

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "dnufft/points.hpp"
#include "dnufft/specfft.hpp"
#include "dnufft/window.hpp"

namespace dnufft::oracle {

/// Default cap on modes * particles per direct-sum call (2^31).
inline constexpr std::uint64_t kDefaultCostCap = std::uint64_t{1} << 31;

/// f_k = sum_j f_j exp(-i k . x_j), k = (2 pi / L) n, n in [-N/2, N/2)^d.
ModeArray nudft_type1(const ParticleSet& ps, int modes, std::uint64_t cost_cap = kDefaultCostCap);

/// f(x_j) = sum_k f_k exp(+i k . x_j).
std::vector<Complex> nudft_type2(const ModeArray& modes, const ParticleSet& positions,
                                 std::uint64_t cost_cap = kDefaultCostCap);

/// Literal C f: every particle is tested against every fine-grid index per
/// axis using the periodic distance d = x/h - i in (-M/2, M/2]; indices with
/// -w/2 < d <= w/2 get weight phi(2d/w). Returns the M^d array, x fastest.
std::vector<Complex> dense_spread_reference(const ParticleSet& ps, const WindowSpec& spec,
                                            int modes);

/// Literal C^T g on an M^d array (x fastest) with the same weight rule.
std::vector<Complex> dense_interp_reference(std::span<const Complex> fine_values,
                                            const ParticleSet& ps, const WindowSpec& spec,
                                            int modes);

/// O(M^{2d}) DFT with the given exponent sign (-1 forward, +1 inverse).
std::vector<Complex> direct_dft(std::span<const Complex> values, int dim, int fine, int sign);

/// Complex frequency omega of the least-damped electrostatic mode of a unit
/// Maxwellian plasma at wavenumber k: root of
/// 1 + (1 + zeta Z(zeta)) / k^2 = 0 with zeta = omega / (k sqrt 2).
std::complex<double> landau_root(double k);

/// Plasma dispersion function Z(zeta) for any complex zeta.
std::complex<double> plasma_dispersion(std::complex<double> zeta);

}  // namespace dnufft::oracle

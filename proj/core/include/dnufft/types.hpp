#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>

namespace dnufft {

using Complex = std::complex<double>;
using Index3 = std::array<std::int64_t, 3>;
using Vec3 = std::array<double, 3>;

inline constexpr int kMinWidth = 2;
inline constexpr int kMaxWidth = 16;

/// Controls how internally parallel kernels execute. Deterministic mode runs
/// every kernel on one thread in a fixed order so repeated calls are
/// bit-identical.
struct Execution {
  bool deterministic = false;
  int threads = 0;  // 0: OpenMP runtime default

  static Execution serial() { return Execution{true, 1}; }
  int resolved_threads() const;
};

}  // namespace dnufft

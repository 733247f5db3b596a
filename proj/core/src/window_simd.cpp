// Built with -ffast-math so the exp calls map to the vector math library.
// Keep this file limited to the batch window evaluation.

#include <cmath>

#include "dnufft/window.hpp"

namespace dnufft {

void es_eval_inplace(double* z, std::size_t count, double beta) noexcept {
#pragma omp simd
  for (std::size_t i = 0; i < count; ++i) {
    const double s = 1.0 - z[i] * z[i];
    const double e = std::exp(beta * (std::sqrt(s > 0.0 ? s : 0.0) - 1.0));
    z[i] = std::abs(z[i]) <= 1.0 ? e : 0.0;
  }
}

}  // namespace dnufft

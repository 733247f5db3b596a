#pragma once

#include <memory>
#include <span>

#include "dnufft/types.hpp"

namespace dnufft {

enum class FftDirection { Forward, Inverse };

/// Unnormalized complex DFT of a cube with `n` points per axis in `dim`
/// dimensions, x fastest. Forward uses exp(-2 pi i k m / n), Inverse the
/// positive exponent. Backed by FFTW; a plan is immutable once built and
/// execute() is safe to call concurrently on distinct buffers.
class FftPlan {
 public:
  FftPlan(int dim, int n, FftDirection direction);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const;

  void execute(std::span<const Complex> in, std::span<Complex> out) const;
  void execute_inplace(std::span<Complex> data) const;

 private:
  struct Impl;
  int dim_ = 0;
  int n_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dnufft

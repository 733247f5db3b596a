#pragma once

#include <span>
#include <vector>

#include "dnufft/fft_backend.hpp"
#include "dnufft/geometry.hpp"
#include "dnufft/types.hpp"

namespace dnufft {

/// Fourier coefficients for n in {-N/2, ..., N/2-1}^dim. Storage is FFT
/// order per axis (n >= 0 at index n, n < 0 at index n + N), x fastest.
class ModeArray {
 public:
  ModeArray() = default;
  ModeArray(int dim, int modes);

  int dim() const { return dim_; }
  int modes() const { return modes_; }
  std::size_t size() const { return values_.size(); }

  static int storage_index(int n, int modes) { return n < 0 ? n + modes : n; }
  static int frequency(int index, int modes) { return index < modes / 2 ? index : index - modes; }

  std::size_t offset(int n1, int n2 = 0, int n3 = 0) const;
  Complex& operator()(int n1, int n2 = 0, int n3 = 0) { return values_[offset(n1, n2, n3)]; }
  Complex operator()(int n1, int n2 = 0, int n3 = 0) const { return values_[offset(n1, n2, n3)]; }

  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

 private:
  int dim_ = 0;
  int modes_ = 0;
  std::vector<Complex> values_;
};

/// Full unnormalized forward DFT of the owned M^d block.
std::vector<Complex> fft_forward(std::span<const Complex> fine_values, int dim, int fine);
std::vector<Complex> fft_forward(const OversampledGrid& grid);
/// Unnormalized inverse (positive exponent) DFT.
std::vector<Complex> fft_inverse(std::span<const Complex> spectrum, int dim, int fine);

/// Keeps array indices {0..N/2-1} and {M-N/2..M-1} on every axis.
ModeArray truncate_modes(std::span<const Complex> full, int dim, int fine, int modes);
/// Places the modes at their slots of an M^d spectrum, zeros elsewhere.
std::vector<Complex> pad_modes(const ModeArray& modes, int fine);

/// Forward and inverse transforms restricted to the retained band, done as
/// one radix-2 Cooley-Tukey step: 2^d parity sub-transforms of size (M/2)^d
/// combined with per-axis twiddles exp(-2 pi i k / M). Only M = 2N.
class PrunedPlan {
 public:
  PrunedPlan(int dim, int fine, int modes, int concurrency = 4);

  int dim() const { return dim_; }
  int fine() const { return fine_; }
  int modes() const { return modes_; }
  int concurrency() const { return concurrency_; }
  /// twiddle()[i] = exp(-2 pi i k / M) for the full index k of storage index i.
  const std::vector<Complex>& twiddle() const { return twiddle_; }

  ModeArray forward(std::span<const Complex> fine_values) const;
  std::vector<Complex> inverse(const ModeArray& modes) const;

 private:
  template <typename F>
  void run_tasks(int count, F&& task) const;

  int dim_;
  int fine_;
  int modes_;
  int concurrency_;
  std::vector<Complex> twiddle_;
  FftPlan sub_forward_;
  FftPlan sub_inverse_;
};

ModeArray pruned_forward(const OversampledGrid& grid, const PrunedPlan& plan);
std::vector<Complex> pruned_inverse(const ModeArray& modes, const PrunedPlan& plan);

}  // namespace dnufft

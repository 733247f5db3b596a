#include "dnufft/fft_backend.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "dnufft/error.hpp"

namespace dnufft {

namespace {
// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FftPlan::Impl {
  fftw_plan plan = nullptr;
  fftw_plan inplace = nullptr;
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (inplace) fftw_destroy_plan(inplace);
  }
};

FftPlan::FftPlan(int dim, int n, FftDirection direction)
    : dim_(dim), n_(n), impl_(std::make_unique<Impl>()) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "FFT dim must be 1, 2 or 3");
  require(n >= 1, ErrorCode::InvalidArgument, "FFT size must be positive");
  std::vector<Complex> scratch_in(size());
  std::vector<Complex> scratch_out(size());
  // FFTW takes row-major dims (slowest first); all axes are equal here.
  int dims[3] = {n, n, n};
  const int sign = direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  std::lock_guard lock(planner_mutex());
  impl_->plan = fftw_plan_dft(dim, dims, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                              reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  impl_->inplace = fftw_plan_dft(dim, dims, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                 reinterpret_cast<fftw_complex*>(scratch_in.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  require(impl_->plan != nullptr && impl_->inplace != nullptr, ErrorCode::BackendFailure, "FFTW failed to build a plan");
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

std::size_t FftPlan::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim_; ++a) s *= static_cast<std::size_t>(n_);
  return s;
}

void FftPlan::execute(std::span<const Complex> in, std::span<Complex> out) const {
  require(in.size() == size() && out.size() == size(), ErrorCode::InvalidArgument,
          "FFT buffer size mismatch");
  if (in.data() == out.data()) {
    execute_inplace(out);
    return;
  }
  fftw_execute_dft(impl_->plan,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void FftPlan::execute_inplace(std::span<Complex> data) const {
  require(data.size() == size(), ErrorCode::InvalidArgument, "FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->inplace, p, p);
}

}  // namespace dnufft

#include "dnufft/specfft.hpp"

#include <atomic>
#include <numbers>
#include <thread>

#include "dnufft/error.hpp"

namespace dnufft {

ModeArray::ModeArray(int dim, int modes) : dim_(dim), modes_(modes) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dim must be 1, 2 or 3");
  require(modes >= 2 && modes % 2 == 0, ErrorCode::InvalidArgument,
          "mode count must be even and >= 2");
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(modes);
  values_.assign(n, Complex{});
}

std::size_t ModeArray::offset(int n1, int n2, int n3) const {
  const auto m = static_cast<std::size_t>(modes_);
  std::size_t off = static_cast<std::size_t>(storage_index(n1, modes_));
  if (dim_ >= 2) off += m * static_cast<std::size_t>(storage_index(n2, modes_));
  if (dim_ >= 3) off += m * m * static_cast<std::size_t>(storage_index(n3, modes_));
  return off;
}

namespace {

std::size_t cube(int n, int dim) {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

// Full-array index of retained storage index i (M > N).
inline int full_index(int i, int modes, int fine) {
  return i < modes / 2 ? i : i - modes + fine;
}

int half_of(int fine, int modes) {
  require(fine == 2 * modes, ErrorCode::InvalidArgument, "pruned FFT requires M = 2N");
  return modes;
}

}  // namespace

std::vector<Complex> fft_forward(std::span<const Complex> fine_values, int dim, int fine) {
  FftPlan plan(dim, fine, FftDirection::Forward);
  std::vector<Complex> out(plan.size());
  plan.execute(fine_values, out);
  return out;
}

std::vector<Complex> fft_forward(const OversampledGrid& grid) {
  require(grid.is_global(), ErrorCode::InvalidArgument,
          "full FFT needs the whole fine grid on one array");
  return fft_forward(grid.owned_values(), grid.dim(), grid.fine());
}

std::vector<Complex> fft_inverse(std::span<const Complex> spectrum, int dim, int fine) {
  FftPlan plan(dim, fine, FftDirection::Inverse);
  std::vector<Complex> out(plan.size());
  plan.execute(spectrum, out);
  return out;
}

ModeArray truncate_modes(std::span<const Complex> full, int dim, int fine, int modes) {
  require(fine >= modes, ErrorCode::InvalidArgument, "fine grid smaller than mode grid");
  require(full.size() == cube(fine, dim), ErrorCode::InvalidArgument, "spectrum size mismatch");
  ModeArray out(dim, modes);
  const int n1 = dim >= 2 ? modes : 1;
  const int n2 = dim >= 3 ? modes : 1;
  const auto m = static_cast<std::size_t>(fine);
  auto dst = out.values().begin();
  for (int i2 = 0; i2 < n2; ++i2)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < modes; ++i0) {
        std::size_t src = static_cast<std::size_t>(full_index(i0, modes, fine));
        if (dim >= 2) src += m * static_cast<std::size_t>(full_index(i1, modes, fine));
        if (dim >= 3) src += m * m * static_cast<std::size_t>(full_index(i2, modes, fine));
        *dst++ = full[src];
      }
  return out;
}

std::vector<Complex> pad_modes(const ModeArray& modes, int fine) {
  const int dim = modes.dim();
  const int n = modes.modes();
  require(fine >= n, ErrorCode::InvalidArgument, "fine grid smaller than mode grid");
  std::vector<Complex> full(cube(fine, dim));
  const int n1 = dim >= 2 ? n : 1;
  const int n2 = dim >= 3 ? n : 1;
  const auto m = static_cast<std::size_t>(fine);
  auto src = modes.values().begin();
  for (int i2 = 0; i2 < n2; ++i2)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < n; ++i0) {
        std::size_t dst = static_cast<std::size_t>(full_index(i0, n, fine));
        if (dim >= 2) dst += m * static_cast<std::size_t>(full_index(i1, n, fine));
        if (dim >= 3) dst += m * m * static_cast<std::size_t>(full_index(i2, n, fine));
        full[dst] = *src++;
      }
  return full;
}

PrunedPlan::PrunedPlan(int dim, int fine, int modes, int concurrency)
    : dim_(dim),
      fine_(fine),
      modes_(modes),
      concurrency_(concurrency),
      sub_forward_(dim, half_of(fine, modes), FftDirection::Forward),
      sub_inverse_(dim, modes, FftDirection::Inverse) {
  require(concurrency >= 1, ErrorCode::InvalidArgument, "concurrency must be >= 1");
  twiddle_.resize(static_cast<std::size_t>(modes));
  for (int i = 0; i < modes; ++i) {
    const double k = full_index(i, modes, fine);
    twiddle_[static_cast<std::size_t>(i)] = std::polar(1.0, -2.0 * std::numbers::pi * k / fine);
  }
}

template <typename F>
void PrunedPlan::run_tasks(int count, F&& task) const {
  const int workers = std::min(concurrency_, count);
  if (workers <= 1) {
    for (int t = 0; t < count; ++t) task(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int t = next++; t < count; t = next++) task(t);
    });
}

ModeArray PrunedPlan::forward(std::span<const Complex> x) const {
  const std::size_t full_size = cube(fine_, dim_);
  require(x.size() == full_size, ErrorCode::InvalidArgument, "pruned FFT input size mismatch");
  const int parities = 1 << dim_;
  const std::size_t sub_size = cube(modes_, dim_);
  const int n = modes_;
  const int n1 = dim_ >= 2 ? n : 1;
  const int n2 = dim_ >= 3 ? n : 1;
  const auto m = static_cast<std::size_t>(fine_);
  std::vector<std::vector<Complex>> sub(static_cast<std::size_t>(parities));

  run_tasks(parities, [&](int p) {
    const int p0 = p & 1, p1 = (p >> 1) & 1, p2 = (p >> 2) & 1;
    std::vector<Complex> gathered(sub_size);
    std::size_t k = 0;
    for (int m2 = 0; m2 < n2; ++m2)
      for (int m1 = 0; m1 < n1; ++m1) {
        std::size_t row = 0;
        if (dim_ >= 2) row += m * static_cast<std::size_t>(2 * m1 + p1);
        if (dim_ >= 3) row += m * m * static_cast<std::size_t>(2 * m2 + p2);
        for (int m0 = 0; m0 < n; ++m0) gathered[k++] = x[row + static_cast<std::size_t>(2 * m0 + p0)];
      }
    auto& out = sub[static_cast<std::size_t>(p)];
    out.resize(sub_size);
    sub_forward_.execute(gathered, out);
  });

  ModeArray result(dim_, modes_);
  auto dst = result.values().begin();
  for (int i2 = 0; i2 < n2; ++i2)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < n; ++i0) {
        const std::size_t idx = static_cast<std::size_t>(i0) + static_cast<std::size_t>(n) *
            (static_cast<std::size_t>(i1) + static_cast<std::size_t>(n1) * static_cast<std::size_t>(i2));
        const Complex t0 = twiddle_[static_cast<std::size_t>(i0)];
        const Complex t1 = dim_ >= 2 ? twiddle_[static_cast<std::size_t>(i1)] : Complex(1.0);
        const Complex t2 = dim_ >= 3 ? twiddle_[static_cast<std::size_t>(i2)] : Complex(1.0);
        Complex acc{};
        for (int p = 0; p < parities; ++p) {
          Complex tw(1.0);
          if (p & 1) tw *= t0;
          if (p & 2) tw *= t1;
          if (p & 4) tw *= t2;
          acc += tw * sub[static_cast<std::size_t>(p)][idx];
        }
        *dst++ = acc;
      }
  return result;
}

std::vector<Complex> PrunedPlan::inverse(const ModeArray& modes) const {
  require(modes.dim() == dim_ && modes.modes() == modes_, ErrorCode::InvalidArgument,
          "mode array does not match the pruned plan");
  const int parities = 1 << dim_;
  const std::size_t sub_size = cube(modes_, dim_);
  const int n = modes_;
  const int n1 = dim_ >= 2 ? n : 1;
  const int n2 = dim_ >= 3 ? n : 1;
  const auto m = static_cast<std::size_t>(fine_);
  std::vector<Complex> x(cube(fine_, dim_));
  const auto c = modes.values();

  run_tasks(parities, [&](int p) {
    const int p0 = p & 1, p1 = (p >> 1) & 1, p2 = (p >> 2) & 1;
    std::vector<Complex> scaled(sub_size);
    std::size_t k = 0;
    for (int i2 = 0; i2 < n2; ++i2)
      for (int i1 = 0; i1 < n1; ++i1) {
        Complex tw_row(1.0);
        if (p1) tw_row *= std::conj(twiddle_[static_cast<std::size_t>(i1)]);
        if (p2) tw_row *= std::conj(twiddle_[static_cast<std::size_t>(i2)]);
        for (int i0 = 0; i0 < n; ++i0, ++k) {
          Complex tw = tw_row;
          if (p0) tw *= std::conj(twiddle_[static_cast<std::size_t>(i0)]);
          scaled[k] = tw * c[k];
        }
      }
    std::vector<Complex> out(sub_size);
    sub_inverse_.execute(scaled, out);
    // Interleave: sub-array element m lands at full index 2m + p.
    k = 0;
    for (int m2 = 0; m2 < n2; ++m2)
      for (int m1 = 0; m1 < n1; ++m1) {
        std::size_t row = 0;
        if (dim_ >= 2) row += m * static_cast<std::size_t>(2 * m1 + p1);
        if (dim_ >= 3) row += m * m * static_cast<std::size_t>(2 * m2 + p2);
        for (int m0 = 0; m0 < n; ++m0) x[row + static_cast<std::size_t>(2 * m0 + p0)] = out[k++];
      }
  });
  return x;
}

ModeArray pruned_forward(const OversampledGrid& grid, const PrunedPlan& plan) {
  require(grid.is_global(), ErrorCode::InvalidArgument,
          "pruned FFT needs the whole fine grid on one array");
  require(grid.fine() == plan.fine() && grid.dim() == plan.dim(), ErrorCode::InvalidArgument,
          "grid does not match the pruned plan");
  return plan.forward(grid.owned_values());
}

std::vector<Complex> pruned_inverse(const ModeArray& modes, const PrunedPlan& plan) {
  return plan.inverse(modes);
}

}  // namespace dnufft

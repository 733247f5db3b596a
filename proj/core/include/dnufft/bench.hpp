#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <functional>
#include <vector>

#include "dnufft/error.hpp"

namespace dnufft {

/// Warm-up runs are executed and discarded; timed runs are measured one by one.
struct BenchProtocol {
  int warmup = 5;
  int timed = 20;
};

struct BenchResult {
  int warmup_runs = 0;
  int timed_runs = 0;
  std::vector<double> seconds;  // one entry per timed run
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;

  /// Millions of points per second at the median time.
  double mpts_per_second(std::size_t points) const {
    return median > 0.0 ? static_cast<double>(points) / median / 1e6 : 0.0;
  }
};

/// Seconds on a monotonic clock; replaceable for tests.
using BenchClock = std::function<double()>;

inline double steady_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

inline double median_of(std::vector<double> v) {
  require(!v.empty(), ErrorCode::InvalidArgument, "median of an empty sample");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Body>
BenchResult run_benchmark(Body&& body, BenchProtocol protocol = {},
                          const BenchClock& clock = steady_seconds) {
  require(protocol.warmup >= 0 && protocol.timed >= 1, ErrorCode::InvalidArgument,
          "benchmark needs warmup >= 0 and timed >= 1");
  BenchResult r;
  for (int i = 0; i < protocol.warmup; ++i) {
    body();
    ++r.warmup_runs;
  }
  r.seconds.reserve(static_cast<std::size_t>(protocol.timed));
  for (int i = 0; i < protocol.timed; ++i) {
    const double start = clock();
    body();
    r.seconds.push_back(clock() - start);
    ++r.timed_runs;
  }
  r.median = median_of(r.seconds);
  const auto [lo, hi] = std::minmax_element(r.seconds.begin(), r.seconds.end());
  r.min = *lo;
  r.max = *hi;
  return r;
}

}  // namespace dnufft

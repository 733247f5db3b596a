#include <omp.h>

#include "dnufft/error.hpp"
#include "dnufft/types.hpp"

namespace dnufft {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::ToleranceOutOfRange: return "tolerance out of range";
    case ErrorCode::PositionOutOfDomain: return "position out of domain";
    case ErrorCode::NonFiniteValue: return "non-finite value";
    case ErrorCode::WidthMismatch: return "width mismatch";
    case ErrorCode::StaleHalo: return "stale halo";
    case ErrorCode::IndexOverflow: return "index overflow";
    case ErrorCode::DeconvolutionUnstable: return "deconvolution unstable";
    case ErrorCode::DecompositionInvalid: return "invalid decomposition";
    case ErrorCode::MessageMismatch: return "message mismatch";
    case ErrorCode::CostCapExceeded: return "cost cap exceeded";
    case ErrorCode::ParseError: return "parse error";
    case ErrorCode::BackendFailure: return "backend failure";
  }
  return "unknown";
}

int Execution::resolved_threads() const {
  if (deterministic) return 1;
  if (threads > 0) return threads;
  return omp_get_max_threads();
}

}  // namespace dnufft

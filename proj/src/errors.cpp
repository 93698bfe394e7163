#include "normgrowth/errors.hpp"

namespace normgrowth {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::invalid_parameter: return "invalid parameter";
    case ErrorCode::not_hermitian: return "operator not Hermitian";
    case ErrorCode::strategy_mismatch: return "propagation strategy mismatch";
    case ErrorCode::exponential_breakdown: return "exponential breakdown";
    case ErrorCode::leakage_abort: return "truncation leakage abort";
    case ErrorCode::window_exhausted: return "interior window exhausted";
    case ErrorCode::invariant_violation: return "invariant violation";
    case ErrorCode::support_violation: return "support violation";
    case ErrorCode::degenerate_initial_state: return "degenerate initial state";
    case ErrorCode::not_nilpotent: return "commutator chain not nilpotent";
    case ErrorCode::empty_window: return "empty fit window";
    case ErrorCode::degenerate_norm: return "degenerate norm";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace normgrowth

#pragma once

#include <stdexcept>
#include <string>

namespace normgrowth {

enum class ErrorCode {
  dimension_mismatch,
  invalid_parameter,
  not_hermitian,
  strategy_mismatch,
  exponential_breakdown,
  leakage_abort,
  window_exhausted,
  invariant_violation,
  support_violation,
  degenerate_initial_state,
  not_nilpotent,
  empty_window,
  degenerate_norm,
  config,
  io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the stepping schemes; remembers which step failed.
class StepError : public Error {
 public:
  StepError(ErrorCode code, long step, const std::string& what)
      : Error(code, "step " + std::to_string(step) + ": " + what), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace normgrowth

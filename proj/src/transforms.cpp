#include "transforms.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "normgrowth/errors.hpp"

namespace normgrowth::detail {

namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

SineTransform::SineTransform(Index n) : n_(n), plan_(nullptr) {
  if (n < 1) throw Error(ErrorCode::invalid_parameter, "sine transform needs n >= 1");
  Eigen::VectorXcd scratch(n);
  int len = static_cast<int>(n);
  fftw_r2r_kind kind = FFTW_RODFT00;
  auto* data = reinterpret_cast<double*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  // Real and imaginary parts transformed as two interleaved real sequences.
  plan_ = fftw_plan_many_r2r(1, &len, 2, data, nullptr, 2, 1, data, nullptr, 2, 1, &kind, kFlags);
  if (!plan_) throw Error(ErrorCode::exponential_breakdown, "FFTW could not plan the sine transform");
}

SineTransform::~SineTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void SineTransform::apply(Eigen::VectorXcd& v) const {
  if (v.size() != n_) throw Error(ErrorCode::dimension_mismatch, "sine transform length mismatch");
  auto* data = reinterpret_cast<double*>(v.data());
  fftw_execute_r2r(static_cast<fftw_plan>(plan_), data, data);
  // FFTW's RODFT00 omits the normalization and carries a factor 2.
  v *= 1.0 / std::sqrt(2.0 * static_cast<double>(n_ + 1));
}

GridTransform::GridTransform(Index n) : n_(n), backward_(nullptr), forward_(nullptr) {
  if (n < 1) throw Error(ErrorCode::invalid_parameter, "grid transform needs n >= 1");
  Eigen::VectorXcd scratch(n);
  auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  backward_ = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_BACKWARD, kFlags);
  forward_ = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_FORWARD, kFlags);
  if (!backward_ || !forward_) throw Error(ErrorCode::exponential_breakdown, "FFTW could not plan the DFT");
}

GridTransform::~GridTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
}

void GridTransform::to_grid(Eigen::VectorXcd& v) const {
  if (v.size() != n_) throw Error(ErrorCode::dimension_mismatch, "grid transform length mismatch");
  auto* data = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(static_cast<fftw_plan>(backward_), data, data);
}

void GridTransform::from_grid(Eigen::VectorXcd& v) const {
  if (v.size() != n_) throw Error(ErrorCode::dimension_mismatch, "grid transform length mismatch");
  auto* data = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_), data, data);
  v /= static_cast<double>(n_);
}

}  // namespace normgrowth::detail

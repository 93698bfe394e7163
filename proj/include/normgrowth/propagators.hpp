#pragma once

#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "normgrowth/spectral.hpp"

namespace normgrowth {

namespace detail {
class SineTransform;
class GridTransform;
}  // namespace detail

enum class Scheme { oracle, magnus_midpoint, strang };
enum class ExpMethod { krylov, dense };

const char* to_string(Scheme scheme);
const char* to_string(ExpMethod method);

/// How the midpoint exponential exp(-i dt H) is applied.
struct ExponentialOptions {
  ExpMethod method = ExpMethod::krylov;
  int krylov_dim = 30;
  double tolerance = 1e-12;
  /// Maximum number of step halvings when the Krylov space is too small.
  int max_substep_depth = 12;
};

struct PropagationPlan {
  Scheme scheme = Scheme::oracle;
  double dt = 2.0 * std::numbers::pi / 1000.0;
  double t_end = 0.0;
  std::vector<double> sample_times;
  std::vector<double> record_orders;
  ExponentialOptions exponential;
  double leakage_threshold = 1e-10;
  double tail_fraction = 0.1;
  bool abort_on_leakage = true;
};

/// t = 0 followed by `count` log-spaced points over [1, t_end].
std::vector<double> default_sample_times(double t_end, int count = 64);

/// Throws invalid_parameter for malformed plans. The truncation-size rule
/// (model.size() >= minimum_modes) is enforced unless allow_small_modes.
void validate_plan(const PropagationPlan& plan, const SpectralModel& model, bool allow_small_modes = false);

struct TrajectorySample {
  double t;
  QuantumState state;
};

struct Trajectory {
  std::string basis_id;
  std::vector<TrajectorySample> samples;
};

/// Reusable transform plans for e^{-itA}. Holds a reference to the model,
/// which must outlive it. apply() is const and safe to call concurrently.
class AFlow {
 public:
  explicit AFlow(const SpectralModel& model);
  ~AFlow();
  AFlow(const AFlow&) = delete;
  AFlow& operator=(const AFlow&) = delete;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& coeffs, double t) const;

 private:
  const SpectralModel& model_;
  std::unique_ptr<detail::SineTransform> sine_;
  std::unique_ptr<detail::GridTransform> grid_;
};

/// e^{-itA} psi, exact for the truncated A.
QuantumState a_propagate(const SpectralModel& model, const QuantumState& state, double t);

/// Exact solution of i psi' = (K0 + V_A(t)) psi from time 0:
/// psi(t) = e^{-itK0} e^{-itA} psi0.
QuantumState oracle_propagate(const SpectralModel& model, const QuantumState& psi0, double t);

/// Exact propagator U(t_to, t_from) = e^{-i t_to K0} e^{-i (t_to - t_from) A} e^{i t_from K0}.
QuantumState oracle_propagate_between(const SpectralModel& model, const QuantumState& psi, double t_from,
                                      double t_to);

/// exp(-i tau H) v for Hermitian band H by Lanczos projection with full
/// reorthogonalization; substeps when the Krylov space does not converge.
Eigen::VectorXcd krylov_expm_apply(const BandMatrix& h, const Eigen::VectorXcd& v, double tau,
                                   const ExponentialOptions& options = {});

/// psi <- exp(-i dt H(t + dt/2)) psi with H(s) = K0 + V_A(s).
QuantumState step_magnus_midpoint(const SpectralModel& model, const QuantumState& state, double t, double dt,
                                  const ExponentialOptions& options = {});

/// exp(-i dt/2 K0) exp(-i dt V_A(t + dt/2)) exp(-i dt/2 K0), the middle
/// factor evaluated as e^{-isK0} e^{-i dt A} e^{isK0}.
QuantumState step_strang(const SpectralModel& model, const QuantumState& state, double t, double dt);
QuantumState step_strang(const AFlow& flow, const SpectralModel& model, const QuantumState& state, double t,
                         double dt);

/// Runs plan.scheme and records the state at every sample time. Raises
/// leakage_abort when the tail mass of a sample exceeds the plan threshold.
Trajectory propagate(const SpectralModel& model, const QuantumState& psi0, const PropagationPlan& plan);

}  // namespace normgrowth

#include "normgrowth/propagators.hpp"

#include <cmath>
#include <optional>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "normgrowth/diagnostics.hpp"
#include "normgrowth/errors.hpp"
#include "normgrowth/models.hpp"
#include "transforms.hpp"

namespace normgrowth {

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::oracle: return "oracle";
    case Scheme::magnus_midpoint: return "magnus-midpoint";
    case Scheme::strang: return "strang";
  }
  return "?";
}

const char* to_string(ExpMethod method) { return method == ExpMethod::krylov ? "krylov" : "dense"; }

std::vector<double> default_sample_times(double t_end, int count) {
  if (!(t_end > 1.0) || count < 2) {
    throw Error(ErrorCode::invalid_parameter, "log-spaced sampling needs t_end > 1 and at least 2 points");
  }
  std::vector<double> times{0.0};
  const double log_end = std::log(t_end);
  for (int k = 0; k < count; ++k) {
    times.push_back(k + 1 == count ? t_end : std::exp(log_end * k / (count - 1)));
  }
  return times;
}

void validate_plan(const PropagationPlan& plan, const SpectralModel& model, bool allow_small_modes) {
  if (!(plan.t_end > 0.0) || !std::isfinite(plan.t_end)) throw Error(ErrorCode::invalid_parameter, "t_end must be > 0");
  if (!(plan.dt > 0.0) || !std::isfinite(plan.dt)) throw Error(ErrorCode::invalid_parameter, "dt must be > 0");
  if (plan.sample_times.empty()) throw Error(ErrorCode::invalid_parameter, "plan has no sample times");
  for (std::size_t k = 0; k < plan.sample_times.size(); ++k) {
    const double t = plan.sample_times[k];
    if (!(t >= 0.0 && t <= plan.t_end)) {
      throw Error(ErrorCode::invalid_parameter, "sample time " + std::to_string(t) + " outside [0, t_end]");
    }
    if (k > 0) {
      const double gap = t - plan.sample_times[k - 1];
      if (!(gap > 0.0)) throw Error(ErrorCode::invalid_parameter, "sample times must be strictly increasing");
      if (plan.dt > gap) {
        throw Error(ErrorCode::invalid_parameter, "dt exceeds the smallest sample gap " + std::to_string(gap));
      }
    }
  }
  for (double r : plan.record_orders) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorCode::invalid_parameter, "orders must be finite and >= 0");
  }
  if (!(plan.tail_fraction > 0.0 && plan.tail_fraction < 0.5)) {
    throw Error(ErrorCode::invalid_parameter, "tail fraction must lie in (0, 0.5)");
  }
  if (plan.exponential.krylov_dim < 2) throw Error(ErrorCode::invalid_parameter, "Krylov dimension must be >= 2");
  const Index needed = minimum_modes(coupling_strength(model), plan.t_end);
  if (!allow_small_modes && model.size() < needed) {
    throw Error(ErrorCode::invalid_parameter,
                "truncation size N = " + std::to_string(model.size()) +
                    " is below the rule N >= ceil(4 * coupling * t_end) + 128 = " + std::to_string(needed));
  }
}

AFlow::AFlow(const SpectralModel& model) : model_(model) {
  switch (model.strategy()) {
    case PropagationStrategy::sine_transform_diagonal:
      sine_ = std::make_unique<detail::SineTransform>(model.size());
      break;
    case PropagationStrategy::grid_multiplication:
      grid_ = std::make_unique<detail::GridTransform>(model.size());
      break;
    case PropagationStrategy::dense_eigendecomposition:
      break;
  }
}

AFlow::~AFlow() = default;

Eigen::VectorXcd AFlow::apply(const Eigen::VectorXcd& coeffs, double t) const {
  const Index n = model_.size();
  if (coeffs.size() != n) throw Error(ErrorCode::dimension_mismatch, "state length does not match model");
  if (t == 0.0) return coeffs;
  switch (model_.strategy()) {
    case PropagationStrategy::sine_transform_diagonal: {
      Eigen::VectorXcd v = coeffs;
      sine_->apply(v);
      const double delta = model_.params().delta;
      for (Index k = 0; k < n; ++k) v[k] *= std::polar(1.0, -t * harmonic_coupling_eigenvalue(n, delta, k));
      sine_->apply(v);
      return v;
    }
    case PropagationStrategy::grid_multiplication: {
      const FourierLayout& layout = *model_.fourier();
      // Positions -> DFT slots j mod n.
      Eigen::VectorXcd v(n);
      for (Index p = 0; p < n; ++p) {
        const long j = layout.mode_index[p];
        v[j >= 0 ? j : j + n] = coeffs[p];
      }
      grid_->to_grid(v);
      for (Index k = 0; k < n; ++k) v[k] *= std::polar(1.0, -t * layout.grid_values[k]);
      grid_->from_grid(v);
      Eigen::VectorXcd out(n);
      for (Index p = 0; p < n; ++p) {
        const long j = layout.mode_index[p];
        out[p] = v[j >= 0 ? j : j + n];
      }
      return out;
    }
    case PropagationStrategy::dense_eigendecomposition: {
      const DenseSpectrum& spec = model_.dense_spectrum();
      Eigen::VectorXcd v = spec.vectors.adjoint() * coeffs;
      for (Index k = 0; k < n; ++k) v[k] *= std::polar(1.0, -t * spec.values[k]);
      return spec.vectors * v;
    }
  }
  throw Error(ErrorCode::strategy_mismatch, "unknown propagation strategy");
}

QuantumState a_propagate(const SpectralModel& model, const QuantumState& state, double t) {
  require_compatible(state, model);
  return QuantumState(state.basis_id(), AFlow(model).apply(state.coeffs(), t));
}

QuantumState oracle_propagate(const SpectralModel& model, const QuantumState& psi0, double t) {
  return apply_free_flow(model, a_propagate(model, psi0, t), t);
}

QuantumState oracle_propagate_between(const SpectralModel& model, const QuantumState& psi, double t_from,
                                      double t_to) {
  QuantumState back = apply_free_flow(model, psi, -t_from);
  return apply_free_flow(model, a_propagate(model, back, t_to - t_from), t_to);
}

namespace {

// One Lanczos attempt; empty when the space of dimension krylov_dim is too
// small for the requested tolerance.
std::optional<Eigen::VectorXcd> lanczos_expm(const BandMatrix& h, const Eigen::VectorXcd& v, double tau,
                                             const ExponentialOptions& options) {
  const Index n = v.size();
  const double beta = v.norm();
  if (beta == 0.0) return v;
  const Index m = std::min<Index>(options.krylov_dim, n);
  Eigen::MatrixXcd basis(n, m);
  Eigen::VectorXd alpha(m);
  Eigen::VectorXd offdiag(m);
  basis.col(0) = v / beta;
  const double scale = std::max(1.0, h.max_abs());

  for (Index j = 0; j < m; ++j) {
    Eigen::VectorXcd w = h.apply(basis.col(j));
    alpha[j] = basis.col(j).dot(w).real();
    w -= alpha[j] * basis.col(j);
    if (j > 0) w -= offdiag[j - 1] * basis.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    }
    const double b = w.norm();
    const Index k = j + 1;

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = offdiag[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
    const Eigen::MatrixXd& q = solver.eigenvectors();
    Eigen::VectorXcd coeff(k);
    for (Index i = 0; i < k; ++i) coeff[i] = q(0, i) * std::polar(1.0, -tau * solver.eigenvalues()[i]);
    Eigen::VectorXcd y = q.cast<cplx>() * coeff;

    const bool invariant = b <= 1e-14 * scale;
    const double err = b * std::abs(y[k - 1]);
    if (invariant || err <= options.tolerance) {
      return (beta * (basis.leftCols(k) * y)).eval();
    }
    if (j + 1 < m) {
      offdiag[j] = b;
      basis.col(j + 1) = w / b;
    }
  }
  return std::nullopt;
}

Eigen::VectorXcd krylov_substepped(const BandMatrix& h, const Eigen::VectorXcd& v, double tau,
                                   const ExponentialOptions& options, int depth) {
  if (auto out = lanczos_expm(h, v, tau, options)) return *out;
  if (depth >= options.max_substep_depth) {
    throw Error(ErrorCode::exponential_breakdown, "Krylov projection did not converge after " +
                                                      std::to_string(depth) + " step halvings");
  }
  Eigen::VectorXcd half = krylov_substepped(h, v, tau / 2, options, depth + 1);
  return krylov_substepped(h, half, tau / 2, options, depth + 1);
}

}  // namespace

Eigen::VectorXcd krylov_expm_apply(const BandMatrix& h, const Eigen::VectorXcd& v, double tau,
                                   const ExponentialOptions& options) {
  if (v.size() != h.size()) throw Error(ErrorCode::dimension_mismatch, "Krylov vector length mismatch");
  return krylov_substepped(h, v, tau, options, 0);
}

QuantumState step_magnus_midpoint(const SpectralModel& model, const QuantumState& state, double t, double dt,
                                  const ExponentialOptions& options) {
  require_compatible(state, model);
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_parameter, "dt must be > 0");
  const BandMatrix h = hamiltonian_matrix(model, t + 0.5 * dt);
  if (options.method == ExpMethod::dense) {
    const Eigen::MatrixXcd u = (cplx{0.0, -dt} * h.to_dense()).exp();
    Eigen::VectorXcd out = u * state.coeffs();
    if (!out.allFinite()) throw Error(ErrorCode::exponential_breakdown, "dense exponential produced non-finite values");
    return QuantumState(state.basis_id(), std::move(out));
  }
  return QuantumState(state.basis_id(), krylov_expm_apply(h, state.coeffs(), dt, options));
}

QuantumState step_strang(const AFlow& flow, const SpectralModel& model, const QuantumState& state, double t,
                         double dt) {
  require_compatible(state, model);
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_parameter, "dt must be > 0");
  const double s = t + 0.5 * dt;
  // Outer half steps merged with the conjugating phases of the middle factor.
  QuantumState rotated = apply_free_flow(model, state, 0.5 * dt - s);
  QuantumState kicked(state.basis_id(), flow.apply(rotated.coeffs(), dt));
  return apply_free_flow(model, kicked, s + 0.5 * dt);
}

QuantumState step_strang(const SpectralModel& model, const QuantumState& state, double t, double dt) {
  return step_strang(AFlow(model), model, state, t, dt);
}

Trajectory propagate(const SpectralModel& model, const QuantumState& psi0, const PropagationPlan& plan) {
  require_compatible(psi0, model);
  validate_plan(plan, model, true);
  Trajectory traj;
  traj.basis_id = psi0.basis_id();
  traj.samples.reserve(plan.sample_times.size());

  auto record = [&](double t, QuantumState state) {
    if (plan.abort_on_leakage) {
      const double leak = truncation_leakage(state, plan.tail_fraction);
      if (leak > plan.leakage_threshold) {
        throw Error(ErrorCode::leakage_abort, "tail mass " + std::to_string(leak) + " at t = " + std::to_string(t) +
                                                  " exceeds " + std::to_string(plan.leakage_threshold));
      }
    }
    traj.samples.push_back({t, std::move(state)});
  };

  if (plan.scheme == Scheme::oracle) {
    const AFlow flow(model);
    for (double t : plan.sample_times) {
      QuantumState s(psi0.basis_id(), flow.apply(psi0.coeffs(), t));
      record(t, apply_free_flow(model, s, t));
    }
    return traj;
  }

  const AFlow flow(model);
  QuantumState state = psi0;
  double t = 0.0;
  long step_index = 0;
  for (double target : plan.sample_times) {
    const double span = target - t;
    if (span > 0.0) {
      const long steps = static_cast<long>(std::ceil(span / plan.dt - 1e-9));
      const double h = span / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k, ++step_index) {
        const double tk = t + h * static_cast<double>(k);
        try {
          state = plan.scheme == Scheme::strang ? step_strang(flow, model, state, tk, h)
                                                : step_magnus_midpoint(model, state, tk, h, plan.exponential);
        } catch (const StepError&) {
          throw;
        } catch (const Error& e) {
          throw StepError(e.code(), step_index, e.what());
        }
      }
      t = target;
    }
    record(target, state);
  }
  return traj;
}

}  // namespace normgrowth

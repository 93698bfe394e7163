#include "normgrowth/spectral.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "normgrowth/errors.hpp"
#include "compensated.hpp"

namespace normgrowth {

namespace {

constexpr double kHermitianTol = 1e-14;
constexpr double kGapTol = 1e-12;

bool is_integer(double x) { return std::abs(x - std::round(x)) <= kGapTol * std::max(1.0, std::abs(x)); }

Eigen::VectorXcd phases(const EigenLadder& ladder, double t) {
  Eigen::VectorXcd out(ladder.size());
  for (Index n = 0; n < ladder.size(); ++n) out[n] = std::polar(1.0, -t * ladder[n]);
  return out;
}

}  // namespace

EigenLadder::EigenLadder(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw Error(ErrorCode::invalid_parameter, "ladder needs at least 2 levels");
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (!std::isfinite(values_[n]) || values_[n] <= 0.0) {
      throw Error(ErrorCode::invalid_parameter, "ladder entries must be finite and strictly positive");
    }
    if (n > 0 && values_[n] < values_[n - 1]) {
      throw Error(ErrorCode::invalid_parameter, "ladder must be non-decreasing");
    }
  }
  exact_gaps_ = true;
  for (double v : values_) {
    if (!is_integer(v - values_.front())) {
      exact_gaps_ = false;
      break;
    }
  }
}

HermitianOperator::HermitianOperator(BandMatrix entries) : entries_(entries.trimmed()) {
  const Index n = entries_.size();
  const Index bw = entries_.bandwidth();
  double scale = 0.0;
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = std::max<Index>(0, i - bw); j <= std::min(n - 1, i + bw); ++j) {
      const cplx v = entries_(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw Error(ErrorCode::invalid_parameter, "operator has non-finite entries");
      }
      scale = std::max(scale, std::abs(v));
      worst = std::max(worst, std::abs(v - std::conj(entries_(j, i))));
    }
  }
  if (worst > kHermitianTol * scale) {
    throw Error(ErrorCode::not_hermitian, "max |H(m,n) - conj H(n,m)| = " + std::to_string(worst));
  }
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::harmonic: return "harmonic";
    case ModelKind::halfwave: return "halfwave";
    case ModelKind::zoll_surrogate: return "zoll-surrogate";
    case ModelKind::custom: return "custom";
  }
  return "?";
}

const char* to_string(PropagationStrategy strategy) {
  switch (strategy) {
    case PropagationStrategy::sine_transform_diagonal: return "sine-transform-diagonal";
    case PropagationStrategy::grid_multiplication: return "grid-multiplication";
    case PropagationStrategy::dense_eigendecomposition: return "dense-eigendecomposition";
  }
  return "?";
}

SpectralModel::SpectralModel(ModelParts parts) : parts_(std::move(parts)) {
  const Index n = parts_.ladder.size();
  if (n < 2) throw Error(ErrorCode::invalid_parameter, "model has no ladder");
  if (parts_.coupling.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "coupling size differs from ladder size");
  }
  if (parts_.basis_id.empty()) parts_.basis_id = parts_.name + "/N=" + std::to_string(n);
  if (!parts_.corrector.empty() && static_cast<Index>(parts_.corrector.size()) != n) {
    throw Error(ErrorCode::dimension_mismatch, "corrector size differs from ladder size");
  }

  const BandMatrix& a = parts_.coupling.matrix();
  switch (parts_.strategy) {
    case PropagationStrategy::sine_transform_diagonal: {
      // The sine transform diagonalizes exactly the zero-diagonal tridiagonal
      // Toeplitz matrix with constant real hopping delta.
      bool ok = a.bandwidth() <= 1;
      for (Index i = 0; ok && i < n; ++i) {
        ok = a(i, i) == cplx{0.0, 0.0};
        if (ok && i + 1 < n) ok = a(i, i + 1) == cplx{parts_.params.delta, 0.0};
      }
      if (!ok) {
        throw Error(ErrorCode::strategy_mismatch,
                    "sine-transform strategy needs A = delta * tridiag(1, 0, 1)");
      }
      break;
    }
    case PropagationStrategy::grid_multiplication:
      if (!parts_.fourier || parts_.fourier->grid_size() != n ||
          static_cast<Index>(parts_.fourier->grid_values.size()) != n) {
        throw Error(ErrorCode::strategy_mismatch, "grid strategy needs a Fourier layout of size N");
      }
      break;
    case PropagationStrategy::dense_eigendecomposition: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.to_dense());
      if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::exponential_breakdown, "dense eigendecomposition failed");
      }
      dense_ = std::make_shared<const DenseSpectrum>(DenseSpectrum{solver.eigenvalues(), solver.eigenvectors()});
      break;
    }
  }
}

const DenseSpectrum& SpectralModel::dense_spectrum() const {
  if (!dense_) throw Error(ErrorCode::strategy_mismatch, "model was not built with the dense strategy");
  return *dense_;
}

QuantumState SpectralModel::basis_state(Index n) const {
  if (n < 0 || n >= size()) throw Error(ErrorCode::dimension_mismatch, "basis index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size());
  v[n] = 1.0;
  return QuantumState(basis_id(), std::move(v));
}

QuantumState SpectralModel::make_state(Eigen::VectorXcd coeffs) const {
  if (coeffs.size() != size()) {
    throw Error(ErrorCode::dimension_mismatch, "state length " + std::to_string(coeffs.size()) +
                                                   " does not match model size " + std::to_string(size()));
  }
  return QuantumState(basis_id(), std::move(coeffs));
}

QuantumState::QuantumState(std::string basis_id, Eigen::VectorXcd coeffs)
    : basis_id_(std::move(basis_id)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 2) throw Error(ErrorCode::dimension_mismatch, "state needs at least 2 modes");
  if (!coeffs_.allFinite()) throw Error(ErrorCode::invalid_parameter, "state has non-finite entries");
}

double QuantumState::norm() const { return coeffs_.norm(); }

void require_compatible(const QuantumState& state, const SpectralModel& model) {
  if (state.size() != model.size() || state.basis_id() != model.basis_id()) {
    throw Error(ErrorCode::dimension_mismatch, "state (" + state.basis_id() + ", " + std::to_string(state.size()) +
                                                   ") does not belong to model (" + model.basis_id() + ")");
  }
}

double sobolev_norm(const QuantumState& state, const SpectralModel& model, double r) {
  require_compatible(state, model);
  if (!std::isfinite(r) || r < 0.0) {
    throw Error(ErrorCode::invalid_parameter, "Sobolev order must be finite and >= 0");
  }
  const auto& ladder = model.ladder();
  detail::CompensatedSum sum;
  for (Index n = 0; n < state.size(); ++n) {
    const double weight = r == 0.0 ? 1.0 : std::pow(ladder[n], 2.0 * r);
    sum.add(weight * std::norm(state[n]));
  }
  return std::sqrt(sum.value());
}

HermitianOperator conjugated_potential(const SpectralModel& model, double t) {
  const BandMatrix& a = model.coupling().matrix();
  const auto& ladder = model.ladder();
  const Index n = a.size();
  const Index bw = a.bandwidth();
  BandMatrix v(n, bw);
  for (Index m = 0; m < n; ++m) {
    for (Index k = std::max<Index>(0, m - bw); k <= std::min(n - 1, m + bw); ++k) {
      const cplx amk = a(m, k);
      if (amk == cplx{0.0, 0.0}) continue;
      v.ref(m, k) = amk * std::polar(1.0, -t * (ladder[m] - ladder[k]));
    }
  }
  return HermitianOperator(std::move(v));
}

HermitianOperator full_perturbation(const SpectralModel& model, double t) {
  HermitianOperator va = conjugated_potential(model, t);
  if (model.corrector().empty()) return va;
  BandMatrix out = va.matrix() + BandMatrix::diagonal(model.corrector());
  return HermitianOperator(std::move(out));
}

BandMatrix hamiltonian_matrix(const SpectralModel& model, double t) {
  return conjugated_potential(model, t).matrix() + BandMatrix::diagonal(model.ladder().values());
}

QuantumState apply_hamiltonian(const SpectralModel& model, const QuantumState& state, double t) {
  require_compatible(state, model);
  const auto& ladder = model.ladder();
  const Eigen::VectorXcd ph = phases(ladder, t);
  // V_A(t) psi = e^{-itK0} A e^{itK0} psi
  Eigen::VectorXcd rotated = ph.conjugate().cwiseProduct(state.coeffs());
  Eigen::VectorXcd out = ph.cwiseProduct(model.coupling().apply(rotated));
  for (Index n = 0; n < state.size(); ++n) out[n] += ladder[n] * state[n];
  return QuantumState(state.basis_id(), std::move(out));
}

QuantumState apply_free_flow(const SpectralModel& model, const QuantumState& state, double t) {
  require_compatible(state, model);
  return QuantumState(state.basis_id(), phases(model.ladder(), t).cwiseProduct(state.coeffs()));
}

}  // namespace normgrowth

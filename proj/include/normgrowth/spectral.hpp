#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "normgrowth/band_matrix.hpp"

namespace normgrowth {

/// Eigenvalues of K0 in basis order: positive, finite and non-decreasing.
class EigenLadder {
 public:
  EigenLadder() = default;
  explicit EigenLadder(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  Index size() const { return static_cast<Index>(values_.size()); }
  double operator[](Index n) const { return values_[static_cast<std::size_t>(n)]; }
  double min() const { return values_.front(); }

  /// True when every difference lambda_m - lambda_n is an integer; this is
  /// what makes the conjugated potential 2*pi periodic.
  bool exact_gaps() const { return exact_gaps_; }

 private:
  std::vector<double> values_;
  bool exact_gaps_ = false;
};

/// Banded Hermitian matrix. Construction rejects anything that is not
/// Hermitian to 1e-14 relative, or that holds non-finite entries.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(BandMatrix entries);

  const BandMatrix& matrix() const { return entries_; }
  Index size() const { return entries_.size(); }
  Index bandwidth() const { return entries_.bandwidth(); }
  cplx operator()(Index m, Index n) const { return entries_(m, n); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return entries_.apply(x); }

 private:
  BandMatrix entries_;
};

enum class ModelKind { harmonic, halfwave, zoll_surrogate, custom };
enum class PropagationStrategy { sine_transform_diagonal, grid_multiplication, dense_eigendecomposition };

const char* to_string(ModelKind kind);
const char* to_string(PropagationStrategy strategy);

struct ModelParameters {
  double delta = 0.0;
  double epsilon = 0.0;
  double lambda = 0.0;
  double mass = 0.0;
};

/// Fourier-mode bookkeeping for the torus models. Position p in the basis
/// holds signed mode mode_index[p], ordered 0, +1, -1, +2, -2, ...
struct FourierLayout {
  Index J = 0;
  std::vector<int> mode_index;
  /// Coefficients v_k for k = -b..b (index k + b).
  std::vector<cplx> potential;
  /// v(x_k) on the 2J+1 point grid x_k = 2 pi k / (2J+1).
  std::vector<double> grid_values;

  Index potential_band() const { return (static_cast<Index>(potential.size()) - 1) / 2; }
  Index grid_size() const { return 2 * J + 1; }
};

struct DenseSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

struct ModelParts {
  std::string name;
  ModelKind kind = ModelKind::custom;
  std::string basis_id;
  EigenLadder ladder;
  HermitianOperator coupling;
  PropagationStrategy strategy = PropagationStrategy::dense_eigendecomposition;
  double lambda_shift = 0.0;
  ModelParameters params;
  std::optional<FourierLayout> fourier;
  /// Diagonal smoothing corrector (Zoll surrogate); empty otherwise.
  std::vector<double> corrector;
  /// Uncorrected eigenvalues (Zoll surrogate); empty otherwise.
  std::vector<double> raw_ladder;
};

class QuantumState;

/// A truncated pair (K0, A). Immutable once built; the dense strategy carries
/// its eigendecomposition, computed at construction.
class SpectralModel {
 public:
  explicit SpectralModel(ModelParts parts);

  const std::string& name() const { return parts_.name; }
  ModelKind kind() const { return parts_.kind; }
  const std::string& basis_id() const { return parts_.basis_id; }
  const EigenLadder& ladder() const { return parts_.ladder; }
  const HermitianOperator& coupling() const { return parts_.coupling; }
  PropagationStrategy strategy() const { return parts_.strategy; }
  double lambda_shift() const { return parts_.lambda_shift; }
  const ModelParameters& params() const { return parts_.params; }
  const std::optional<FourierLayout>& fourier() const { return parts_.fourier; }
  std::span<const double> corrector() const { return parts_.corrector; }
  std::span<const double> raw_ladder() const { return parts_.raw_ladder; }
  Index size() const { return parts_.ladder.size(); }

  /// Throws strategy_mismatch unless the strategy is dense.
  const DenseSpectrum& dense_spectrum() const;

  QuantumState basis_state(Index n) const;
  QuantumState make_state(Eigen::VectorXcd coeffs) const;

 private:
  ModelParts parts_;
  std::shared_ptr<const DenseSpectrum> dense_;
};

/// Coefficients in the K0 eigenbasis of one model family.
class QuantumState {
 public:
  QuantumState(std::string basis_id, Eigen::VectorXcd coeffs);

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  const std::string& basis_id() const { return basis_id_; }
  Index size() const { return coeffs_.size(); }
  cplx operator[](Index n) const { return coeffs_[n]; }
  double norm() const;

 private:
  std::string basis_id_;
  Eigen::VectorXcd coeffs_;
};

/// Throws dimension_mismatch if the state does not live in the model's basis.
void require_compatible(const QuantumState& state, const SpectralModel& model);

/// (sum_n lambda_n^{2r} |psi_n|^2)^{1/2}, compensated summation; r >= 0.
double sobolev_norm(const QuantumState& state, const SpectralModel& model, double r);

/// V_A(t) = e^{-itK0} A e^{itK0}, assembled entrywise:
/// V(m,n) = A(m,n) exp(-i t (lambda_m - lambda_n)).
HermitianOperator conjugated_potential(const SpectralModel& model, double t);

/// Q + V_A(t); equals V_A(t) for models without a corrector.
HermitianOperator full_perturbation(const SpectralModel& model, double t);

/// K0 + V_A(t) as a band matrix.
BandMatrix hamiltonian_matrix(const SpectralModel& model, double t);

/// (K0 + V_A(t)) psi in O(N b).
QuantumState apply_hamiltonian(const SpectralModel& model, const QuantumState& state, double t);

/// e^{-i t K0} psi.
QuantumState apply_free_flow(const SpectralModel& model, const QuantumState& state, double t);

}  // namespace normgrowth

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "normgrowth/spectral.hpp"

namespace normgrowth {

/// Rows [first, last] on which the truncated commutators agree with those of
/// the infinite ladder.
struct RowWindow {
  Index first = 0;
  Index last = -1;
  bool empty() const { return last < first; }
};

/// ad_A^j(K) for j = 0..jmax, with ad_A(B) = [A, B] = AB - BA.
///
/// With A and K Hermitian, ad_A^j(K) is Hermitian for even j and
/// anti-Hermitian for odd j.
struct CommutatorChain {
  std::vector<BandMatrix> terms;
  RowWindow interior;
  /// Bandwidth of A in the basis ordering.
  Index coupling_bandwidth = 0;
};

/// Which operator the commutators are taken against. `surrogate` selects the
/// signed mode index D for the torus models and K0 itself otherwise.
enum class Reference { k0, surrogate };

/// Rows at distance >= bandwidth * depth from both ends.
RowWindow interior_window(const SpectralModel& model, Index depth);

/// The reference operator K0 (or D) as a diagonal band matrix.
BandMatrix reference_operator(const SpectralModel& model, Reference reference = Reference::k0);

/// Requires jmax * bandwidth(A) < N / 4 (window_exhausted otherwise).
CommutatorChain commutator_chain(const SpectralModel& model, int jmax, Reference reference = Reference::k0);

/// ad_A^j(K0); same precondition as commutator_chain.
BandMatrix iterated_commutator(const SpectralModel& model, int j, Reference reference = Reference::k0);

struct NilpotencyReport {
  /// Least N* with ad_A^{N*+1}(K) = 0 on interior rows; empty when none up to N_max.
  std::optional<int> n_star;
  /// max |ad_A^j(K)| on interior rows, j = 0..checked depth.
  std::vector<double> interior_max;
  /// True when the vanishing commutator is exactly zero in floating point.
  bool exact = false;
  /// N* = 0: [A, K] = 0 and no growth is produced.
  bool no_growth = false;
  std::string description;
};

NilpotencyReport verify_nilpotency(const SpectralModel& model, int n_max, bool use_surrogate_k = false);

/// Both evaluations of ad_A^M(K0^{2r}) and how far apart they are.
struct AdPowerRoutes {
  /// Iterated commutation against K0^{2r}.
  BandMatrix direct;
  /// Multinomial (Leibniz) expansion over compositions k_1 + ... + k_{2r} = M.
  BandMatrix multinomial;
  RowWindow interior;
  /// max |direct - multinomial| / max |direct| on interior rows (absolute when direct vanishes).
  double discrepancy = 0.0;
};

AdPowerRoutes ad_power_routes(const SpectralModel& model, int M, int r);

/// ad_A^M(K0^{2r}) by direct commutation, cross-checked against the
/// multinomial expansion; raises invariant_violation when the two disagree
/// beyond 1e-10 relative on interior rows. Requires 2 r M b < N / 4.
BandMatrix expand_ad_power(const SpectralModel& model, int M, int r);

/// ||e^{-itA} psi0||_r^2 = sum_{M=0}^{2rN*} coefficients[M] t^M.
struct LiePolynomial {
  int r = 0;
  int n_star = 0;
  std::vector<double> coefficients;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  double operator()(double t) const;
};

/// Coefficients (i^M / M!) <ad_A^M(K0^{2r}) psi0, psi0>. psi0 must be
/// supported at distance >= 2 r N* b + b from both ends (support_violation).
LiePolynomial lie_polynomial(const SpectralModel& model, const QuantumState& psi0, int r);

double lie_norm_expansion(const SpectralModel& model, const QuantumState& psi0, int r, double t);

/// Leading coefficient c* of the Lie polynomial: ||psi(t)||_r^2 / t^{2rN*} -> c*.
/// Raises degenerate_initial_state when [ad_A^{N*}(K0)]^r psi0 = 0.
double growth_lower_constant(const SpectralModel& model, const QuantumState& psi0, int r);

}  // namespace normgrowth

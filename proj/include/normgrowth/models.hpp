#pragma once

#include <span>
#include <string>
#include <vector>

#include "normgrowth/spectral.hpp"

namespace normgrowth {

/// Parameters of one concrete model. `modes` is N for the harmonic model and
/// J (N = 2J+1) for the torus models.
struct ModelConfig {
  ModelKind kind = ModelKind::harmonic;
  Index modes = 0;
  double delta = 0.25;
  double epsilon = 0.25;
  double lambda = 0.5;
  double mass = 1.0;
};

/// Harmonic oscillator truncated to N Hermite modes: lambda_n = n + 1/2 and
/// A e_0 = delta e_1, A e_n = delta (e_{n+1} + e_{n-1}).
SpectralModel build_harmonic(Index N, double delta);

/// Half-wave operator |D| + lambda on 2J+1 Fourier modes with A the
/// multiplication by v. potential_coeffs holds v_k for k = -b..b.
SpectralModel build_halfwave(Index J, double lambda, std::span<const cplx> potential_coeffs);

/// One-dimensional surrogate of sqrt(-Delta + m^2) + Q: raw ladder
/// sqrt(j^2 + m^2), corrected ladder |j| (and 1 at j = 0), corrector
/// q_j = lambda_j - sqrt(j^2 + m^2). Same A as build_halfwave.
SpectralModel build_zoll_surrogate(Index J, double mass, std::span<const cplx> potential_coeffs);

/// Arbitrary (ladder, A) pair propagated by dense Hermitian eigendecomposition.
SpectralModel build_dense_model(std::string name, std::vector<double> ladder, BandMatrix coupling);

/// Validates the ModelConfig ranges and dispatches to the builders; the torus
/// models use v = 2 epsilon cos x.
SpectralModel build_model(const ModelConfig& config);

/// Fourier coefficients of v(x) = 2 epsilon cos x, i.e. {epsilon, 0, epsilon}.
std::vector<cplx> cosine_potential(double epsilon);

/// Position of signed Fourier mode j in the ordering 0, +1, -1, +2, -2, ...
Index fourier_position(long j);
long fourier_mode(Index position);

/// Eigenvalue k (k = 0..N-1) of delta * tridiag(1, 0, 1): 2 delta cos(pi (k+1)/(N+1)).
double harmonic_coupling_eigenvalue(Index N, double delta, Index k);

/// sum_k |v_k|, an upper bound for sup |v| that is attained by 2 epsilon cos x.
double potential_bound(std::span<const cplx> potential_coeffs);

/// Largest per-site coupling used by the truncation-size rule: |delta| for
/// the harmonic model, the potential bound for the torus models, the max
/// entry of A otherwise.
double coupling_strength(const SpectralModel& model);

/// ceil(4 * coupling * t_end) + 128.
Index minimum_modes(double coupling, double t_end);

}  // namespace normgrowth

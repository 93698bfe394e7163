#include "normgrowth/models.hpp"

#include <cmath>
#include <numbers>

#include "normgrowth/errors.hpp"

namespace normgrowth {

namespace {

std::string fourier_basis_id(Index J) { return "fourier/J=" + std::to_string(J); }

void check_potential(std::span<const cplx> v) {
  if (v.size() < 3 || v.size() % 2 == 0) {
    throw Error(ErrorCode::invalid_parameter, "potential needs coefficients v_k for k = -b..b with b >= 1");
  }
  const Index b = (static_cast<Index>(v.size()) - 1) / 2;
  double scale = 0.0;
  for (const cplx& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw Error(ErrorCode::invalid_parameter, "potential has non-finite coefficients");
    }
    scale = std::max(scale, std::abs(c));
  }
  for (Index k = 0; k <= b; ++k) {
    if (std::abs(v[b - k] - std::conj(v[b + k])) > 1e-14 * scale) {
      throw Error(ErrorCode::invalid_parameter,
                  "potential is not real: v_{-k} != conj(v_k) at k = " + std::to_string(k));
    }
  }
  bool constant = true;
  for (Index k = 1; k <= b; ++k) constant = constant && std::abs(v[b + k]) == 0.0;
  if (constant) throw Error(ErrorCode::invalid_parameter, "potential is constant (grad v vanishes)");
}

// Fourier multiplication by v on 2J+1 modes. The mode difference is taken
// modulo 2J+1, so the matrix is exactly the grid product (circulant); the
// wrapped entries only couple modes near |j| = J.
FourierLayout fourier_layout(Index J, std::span<const cplx> v) {
  FourierLayout layout;
  layout.J = J;
  const Index n = 2 * J + 1;
  layout.mode_index.resize(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) layout.mode_index[p] = static_cast<int>(fourier_mode(p));
  layout.potential.assign(v.begin(), v.end());
  layout.grid_values.resize(static_cast<std::size_t>(n));
  const Index b = layout.potential_band();
  for (Index k = 0; k < n; ++k) {
    const double x = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    double value = v[b].real();
    for (Index q = 1; q <= b; ++q) value += 2.0 * (v[b + q] * std::polar(1.0, static_cast<double>(q) * x)).real();
    layout.grid_values[k] = value;
  }
  return layout;
}

HermitianOperator fourier_coupling(Index J, std::span<const cplx> v) {
  const Index n = 2 * J + 1;
  const Index b = (static_cast<Index>(v.size()) - 1) / 2;
  auto wrap = [&](long j) {
    j %= static_cast<long>(n);
    if (j > J) j -= n;
    if (j < -J) j += n;
    return j;
  };
  Index bw = 0;
  for (Index p = 0; p < n; ++p)
    for (Index k = -b; k <= b; ++k)
      if (v[b + k] != cplx{0.0, 0.0}) bw = std::max(bw, std::abs(fourier_position(wrap(fourier_mode(p) - k)) - p));
  BandMatrix a(n, bw);
  for (Index p = 0; p < n; ++p) {
    for (Index k = -b; k <= b; ++k) {
      if (v[b + k] == cplx{0.0, 0.0}) continue;
      a.ref(p, fourier_position(wrap(fourier_mode(p) - k))) = v[b + k];
    }
  }
  return HermitianOperator(std::move(a));
}

void check_fourier_size(Index J, std::span<const cplx> v) {
  if (J < 4) throw Error(ErrorCode::invalid_parameter, "J must be >= 4");
  check_potential(v);
  if ((static_cast<Index>(v.size()) - 1) / 2 >= J) {
    throw Error(ErrorCode::invalid_parameter, "potential band must be smaller than J");
  }
}

}  // namespace

Index fourier_position(long j) { return j == 0 ? 0 : (j > 0 ? 2 * j - 1 : -2 * j); }

long fourier_mode(Index position) {
  if (position == 0) return 0;
  return position % 2 == 1 ? (position + 1) / 2 : -(position / 2);
}

double harmonic_coupling_eigenvalue(Index N, double delta, Index k) {
  return 2.0 * delta * std::cos(std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(N + 1));
}

std::vector<cplx> cosine_potential(double epsilon) { return {epsilon, 0.0, epsilon}; }

double potential_bound(std::span<const cplx> potential_coeffs) {
  double sum = 0.0;
  for (const cplx& c : potential_coeffs) sum += std::abs(c);
  return sum;
}

SpectralModel build_harmonic(Index N, double delta) {
  if (N < 8) throw Error(ErrorCode::invalid_parameter, "harmonic model needs N >= 8");
  if (delta == 0.0 || !std::isfinite(delta)) throw Error(ErrorCode::invalid_parameter, "delta must be finite and nonzero");
  std::vector<double> ladder(static_cast<std::size_t>(N));
  for (Index n = 0; n < N; ++n) ladder[n] = static_cast<double>(n) + 0.5;
  BandMatrix a(N, 1);
  for (Index n = 0; n + 1 < N; ++n) {
    a.ref(n, n + 1) = delta;
    a.ref(n + 1, n) = delta;
  }
  ModelParts parts;
  parts.name = "harmonic";
  parts.kind = ModelKind::harmonic;
  parts.basis_id = "hermite/N=" + std::to_string(N);
  parts.ladder = EigenLadder(std::move(ladder));
  parts.coupling = HermitianOperator(std::move(a));
  parts.strategy = PropagationStrategy::sine_transform_diagonal;
  parts.lambda_shift = 0.5;
  parts.params.delta = delta;
  return SpectralModel(std::move(parts));
}

SpectralModel build_halfwave(Index J, double lambda, std::span<const cplx> potential_coeffs) {
  check_fourier_size(J, potential_coeffs);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::invalid_parameter, "lambda must be > 0");
  const Index n = 2 * J + 1;
  std::vector<double> ladder(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) ladder[p] = static_cast<double>(std::abs(fourier_mode(p))) + lambda;
  ModelParts parts;
  parts.name = "halfwave";
  parts.kind = ModelKind::halfwave;
  parts.basis_id = fourier_basis_id(J);
  parts.ladder = EigenLadder(std::move(ladder));
  parts.coupling = fourier_coupling(J, potential_coeffs);
  parts.strategy = PropagationStrategy::grid_multiplication;
  parts.lambda_shift = lambda;
  parts.params.lambda = lambda;
  parts.params.epsilon = potential_coeffs[potential_coeffs.size() / 2 + 1].real();
  parts.fourier = fourier_layout(J, potential_coeffs);
  return SpectralModel(std::move(parts));
}

SpectralModel build_zoll_surrogate(Index J, double mass, std::span<const cplx> potential_coeffs) {
  check_fourier_size(J, potential_coeffs);
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error(ErrorCode::invalid_parameter, "mass must be > 0");
  const Index n = 2 * J + 1;
  std::vector<double> raw(static_cast<std::size_t>(n));
  std::vector<double> ladder(static_cast<std::size_t>(n));
  std::vector<double> q(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) {
    const double j = static_cast<double>(fourier_mode(p));
    raw[p] = std::hypot(j, mass);
    // j = 0 is lifted to 1 so that K0 stays positive with integer spectrum.
    ladder[p] = j == 0.0 ? 1.0 : std::abs(j);
    q[p] = ladder[p] - raw[p];
  }
  ModelParts parts;
  parts.name = "zoll-surrogate";
  parts.kind = ModelKind::zoll_surrogate;
  parts.basis_id = fourier_basis_id(J);
  parts.ladder = EigenLadder(std::move(ladder));
  parts.coupling = fourier_coupling(J, potential_coeffs);
  parts.strategy = PropagationStrategy::grid_multiplication;
  parts.lambda_shift = 0.0;
  parts.params.mass = mass;
  parts.params.epsilon = potential_coeffs[potential_coeffs.size() / 2 + 1].real();
  parts.fourier = fourier_layout(J, potential_coeffs);
  parts.corrector = std::move(q);
  parts.raw_ladder = std::move(raw);
  return SpectralModel(std::move(parts));
}

SpectralModel build_dense_model(std::string name, std::vector<double> ladder, BandMatrix coupling) {
  ModelParts parts;
  parts.name = std::move(name);
  parts.kind = ModelKind::custom;
  parts.ladder = EigenLadder(std::move(ladder));
  parts.coupling = HermitianOperator(std::move(coupling));
  parts.strategy = PropagationStrategy::dense_eigendecomposition;
  parts.lambda_shift = parts.ladder.min();
  return SpectralModel(std::move(parts));
}

SpectralModel build_model(const ModelConfig& config) {
  auto in = [](double x, double lo, double hi, bool lo_open, bool hi_open) {
    return (lo_open ? x > lo : x >= lo) && (hi_open ? x < hi : x <= hi);
  };
  switch (config.kind) {
    case ModelKind::harmonic:
      if (config.modes < 8) throw Error(ErrorCode::invalid_parameter, "modes: N must be >= 8");
      if (!in(config.delta, 0.0, 1.0, true, false)) throw Error(ErrorCode::invalid_parameter, "delta must lie in (0, 1]");
      return build_harmonic(config.modes, config.delta);
    case ModelKind::halfwave:
      if (config.modes < 4) throw Error(ErrorCode::invalid_parameter, "modes: J must be >= 4");
      if (!in(config.epsilon, 0.0, 1.0, true, false)) throw Error(ErrorCode::invalid_parameter, "epsilon must lie in (0, 1]");
      if (!in(config.lambda, 0.0, 1.0, true, true)) throw Error(ErrorCode::invalid_parameter, "lambda must lie in (0, 1)");
      return build_halfwave(config.modes, config.lambda, cosine_potential(config.epsilon));
    case ModelKind::zoll_surrogate:
      if (config.modes < 4) throw Error(ErrorCode::invalid_parameter, "modes: J must be >= 4");
      if (!in(config.epsilon, 0.0, 1.0, true, false)) throw Error(ErrorCode::invalid_parameter, "epsilon must lie in (0, 1]");
      if (!in(config.mass, 0.0, 10.0, true, false)) throw Error(ErrorCode::invalid_parameter, "mass must lie in (0, 10]");
      return build_zoll_surrogate(config.modes, config.mass, cosine_potential(config.epsilon));
    case ModelKind::custom:
      break;
  }
  throw Error(ErrorCode::invalid_parameter, "custom models cannot be built from a ModelConfig");
}

double coupling_strength(const SpectralModel& model) {
  switch (model.kind()) {
    case ModelKind::harmonic: return std::abs(model.params().delta);
    case ModelKind::halfwave:
    case ModelKind::zoll_surrogate: return potential_bound(model.fourier()->potential);
    case ModelKind::custom: break;
  }
  return model.coupling().matrix().max_abs();
}

Index minimum_modes(double coupling, double t_end) {
  return static_cast<Index>(std::ceil(4.0 * std::abs(coupling) * t_end)) + 128;
}

}  // namespace normgrowth

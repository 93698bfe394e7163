#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "normgrowth/errors.hpp"
#include "normgrowth/models.hpp"

using namespace normgrowth;

TEST_CASE("harmonic ladder and coupling") {
  const double delta = 0.25;
  const SpectralModel h = build_harmonic(20, delta);
  CHECK(h.ladder()[0] == 0.5);
  CHECK(h.ladder()[1] == 1.5);
  CHECK(h.ladder()[2] == 2.5);
  for (Index n = 0; n + 1 < h.size(); ++n) CHECK(h.ladder()[n + 1] - h.ladder()[n] == 1.0);
  CHECK(h.ladder().exact_gaps());
  CHECK(h.strategy() == PropagationStrategy::sine_transform_diagonal);

  const BandMatrix& a = h.coupling().matrix();
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(20);
  e0[0] = 1.0;
  Eigen::VectorXcd ae0 = a.apply(e0);
  CHECK(ae0[1] == cplx{delta, 0.0});
  CHECK(ae0.norm() == doctest::Approx(delta));
  for (Index n = 1; n <= 18; ++n) {
    Eigen::VectorXcd en = Eigen::VectorXcd::Zero(20);
    en[n] = 1.0;
    Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(20);
    expected[n - 1] = expected[n + 1] = delta;
    CHECK((a.apply(en) - expected).norm() == 0.0);
  }
}

TEST_CASE("harmonic coupling is diagonalized by the sine basis") {
  const Index n = 64;
  const double delta = 0.25;
  const SpectralModel h = build_harmonic(n, delta);
  // A = S diag(mu) S with S_{jk} = sqrt(2/(N+1)) sin(pi (j+1)(k+1)/(N+1))
  Eigen::MatrixXd s(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k)
      s(j, k) = std::sqrt(2.0 / (n + 1)) * std::sin(std::numbers::pi * (j + 1) * (k + 1) / (n + 1));
  Eigen::VectorXd mu(n);
  for (Index k = 0; k < n; ++k) mu[k] = harmonic_coupling_eigenvalue(n, delta, k);
  const Eigen::MatrixXd rebuilt = s * mu.asDiagonal() * s;
  const Eigen::MatrixXcd a = h.coupling().matrix().to_dense();
  CHECK((rebuilt.cast<cplx>() - a).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fourier mode ordering") {
  CHECK(fourier_position(0) == 0);
  CHECK(fourier_position(1) == 1);
  CHECK(fourier_position(-1) == 2);
  CHECK(fourier_position(2) == 3);
  CHECK(fourier_position(-2) == 4);
  for (Index p = 0; p < 41; ++p) CHECK(fourier_position(fourier_mode(p)) == p);
}

TEST_CASE("half-wave ladder and coupling") {
  const double eps = 0.25;
  const SpectralModel w = build_halfwave(10, 0.5, cosine_potential(eps));
  CHECK(w.size() == 21);
  const double expected[] = {0.5, 1.5, 1.5, 2.5, 2.5};
  for (int p = 0; p < 5; ++p) CHECK(w.ladder()[p] == expected[p]);
  CHECK(w.ladder().exact_gaps());
  CHECK(w.strategy() == PropagationStrategy::grid_multiplication);

  const BandMatrix& a = w.coupling().matrix();
  for (long j = -9; j <= 9; ++j) {
    for (long k = -10; k <= 10; ++k) {
      const cplx entry = a(fourier_position(j), fourier_position(k));
      CHECK(entry == cplx{std::abs(j - k) == 1 ? eps : 0.0, 0.0});
    }
  }
  // truncated multiplication wraps j = +-J onto each other
  CHECK(a(fourier_position(10), fourier_position(-10)) == cplx{eps, 0.0});
}

TEST_CASE("half-wave potential validation") {
  auto code_of = [](std::vector<cplx> v) {
    try {
      build_halfwave(8, 0.5, v);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  CHECK(code_of({{0.25, 0.1}, 0.0, {0.25, 0.1}}) == ErrorCode::invalid_parameter);
  CHECK(code_of({0.0, 1.0, 0.0}) == ErrorCode::invalid_parameter);
  CHECK_NOTHROW(build_halfwave(8, 0.5, std::vector<cplx>{{0.25, -0.1}, 0.0, {0.25, 0.1}}));
}

TEST_CASE("zoll surrogate corrector") {
  const double m = 1.0;
  const SpectralModel z = build_zoll_surrogate(600, m, cosine_potential(0.25));
  CHECK(z.ladder()[0] == 1.0);
  CHECK(z.ladder().exact_gaps());
  const auto q = z.corrector();
  CHECK(std::abs(q[0] - (1.0 - m)) < 1e-15);
  for (long j = -600; j <= 600; ++j) {
    const Index p = fourier_position(j);
    if (j != 0) CHECK(q[p] == doctest::Approx(std::abs(j) - std::sqrt(double(j * j) + m * m)));
    CHECK(z.raw_ladder()[p] == doctest::Approx(std::sqrt(double(j * j) + m * m)));
    if (std::abs(j) >= 8 * m) CHECK(std::abs(q[p]) * std::abs(j) <= m * m / 2.0 * (1.0 + 1e-12));
    if (std::abs(j) >= 64 && std::abs(j) <= 512) {
      CHECK(std::abs(std::abs(q[p]) * std::abs(j) - m * m / 2.0) <= 0.05 * m * m / 2.0);
    }
  }
  const SpectralModel z3 = build_zoll_surrogate(20, 3.0, cosine_potential(0.25));
  CHECK(z3.corrector()[0] == doctest::Approx(-2.0));
}

TEST_CASE("half-wave and zoll share the coupling") {
  const SpectralModel w = build_halfwave(16, 0.5, cosine_potential(0.3));
  const SpectralModel z = build_zoll_surrogate(16, 2.0, cosine_potential(0.3));
  CHECK((w.coupling().matrix() - z.coupling().matrix()).max_abs() == 0.0);
}

TEST_CASE("model config ranges") {
  auto code_of = [](ModelConfig c) {
    try {
      build_model(c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  CHECK(code_of({ModelKind::harmonic, 16, 0.0}) == ErrorCode::invalid_parameter);
  CHECK(code_of({ModelKind::harmonic, 16, 1.5}) == ErrorCode::invalid_parameter);
  CHECK(code_of({ModelKind::harmonic, 4, 0.25}) == ErrorCode::invalid_parameter);
  CHECK(code_of({ModelKind::halfwave, 8, 0.25, 0.25, 1.0}) == ErrorCode::invalid_parameter);
  CHECK(code_of({ModelKind::zoll_surrogate, 8, 0.25, 0.25, 0.5, 11.0}) == ErrorCode::invalid_parameter);
  CHECK(code_of({ModelKind::zoll_surrogate, 3}) == ErrorCode::invalid_parameter);
  CHECK(build_model({ModelKind::halfwave, 8}).size() == 17);
}

TEST_CASE("truncation size rule") {
  CHECK(minimum_modes(0.25, 1000.0) == 1128);
  CHECK(minimum_modes(0.5, 1000.0) == 2128);
  CHECK(coupling_strength(build_harmonic(16, 0.25)) == 0.25);
  CHECK(coupling_strength(build_halfwave(8, 0.5, cosine_potential(0.25))) == 0.5);
}

TEST_CASE("dense model eigendecomposition") {
  BandMatrix a(6, 1);
  for (Index i = 0; i + 1 < 6; ++i) a.ref(i, i + 1) = a.ref(i + 1, i) = 0.3 * (i + 1);
  const SpectralModel d = build_dense_model("chain", {1, 2, 3, 4, 5, 6}, a);
  const DenseSpectrum& s = d.dense_spectrum();
  const Eigen::MatrixXcd back = s.vectors * s.values.cast<cplx>().asDiagonal() * s.vectors.adjoint();
  CHECK((back - a.to_dense()).norm() < 1e-13);
  CHECK_THROWS_AS(build_harmonic(16, 0.25).dense_spectrum(), Error);
}

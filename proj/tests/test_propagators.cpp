#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "normgrowth/errors.hpp"
#include "normgrowth/models.hpp"
#include "normgrowth/propagators.hpp"

using namespace normgrowth;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXcd random_unit(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Index k = 0; k < n; ++k) v[k] = {g(rng), g(rng)};
  return v / v.norm();
}

// exp(-itA) v through an independent dense eigendecomposition
Eigen::VectorXcd dense_flow(const BandMatrix& a, const Eigen::VectorXcd& v, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.to_dense());
  Eigen::VectorXcd ph(v.size());
  for (Index k = 0; k < v.size(); ++k) ph[k] = std::polar(1.0, -t * es.eigenvalues()[k]);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() * v;
}

double rel_error(const QuantumState& a, const QuantumState& b) {
  return (a.coeffs() - b.coeffs()).norm() / b.norm();
}

double final_error(const SpectralModel& model, const QuantumState& psi0, Scheme scheme, double dt) {
  PropagationPlan plan;
  plan.scheme = scheme;
  plan.dt = dt;
  plan.t_end = 2.0 * kPi;
  plan.sample_times = {2.0 * kPi};
  const Trajectory tr = propagate(model, psi0, plan);
  return rel_error(tr.samples.back().state, oracle_propagate(model, psi0, 2.0 * kPi));
}

}  // namespace

TEST_CASE("A flow at t = 0 is the identity") {
  std::mt19937_64 rng(11);
  for (const SpectralModel& m : {build_harmonic(32, 0.25), build_halfwave(16, 0.5, cosine_potential(0.25))}) {
    const QuantumState psi = m.make_state(random_unit(m.size(), rng));
    CHECK((a_propagate(m, psi, 0.0).coeffs() - psi.coeffs()).norm() == 0.0);
    CHECK((oracle_propagate(m, psi, 0.0).coeffs() - psi.coeffs()).norm() == 0.0);
  }
}

TEST_CASE("A flow is unitary") {
  std::mt19937_64 rng(12);
  const SpectralModel models[] = {build_harmonic(100, 0.25), build_halfwave(40, 0.5, cosine_potential(0.25)),
                                  build_zoll_surrogate(40, 1.0, cosine_potential(0.25))};
  for (const SpectralModel& m : models) {
    for (double t : {1.0, 10.0, 100.0}) {
      const QuantumState psi = m.make_state(random_unit(m.size(), rng));
      CHECK(std::abs(a_propagate(m, psi, t).norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("harmonic A flow matches a dense eigendecomposition") {
  const SpectralModel h = build_harmonic(32, 0.25);
  const QuantumState psi = h.basis_state(0);
  const Eigen::VectorXcd expected = dense_flow(h.coupling().matrix(), psi.coeffs(), 5.0);
  const Eigen::VectorXcd got = a_propagate(h, psi, 5.0).coeffs();
  for (Index n = 0; n < 32; ++n) CHECK(std::abs(std::abs(got[n]) - std::abs(expected[n])) < 1e-12);
  CHECK((got - expected).norm() < 1e-12);
}

TEST_CASE("grid multiplication matches a dense eigendecomposition") {
  std::mt19937_64 rng(13);
  const SpectralModel w = build_halfwave(32, 0.5, cosine_potential(0.25));
  REQUIRE(w.size() == 65);
  const std::vector<cplx> wide{{0.05, 0.02}, {0.1, -0.03}, 0.0, {0.1, 0.03}, {0.05, -0.02}};
  const SpectralModel w2 = build_halfwave(32, 0.5, wide);
  for (const SpectralModel* m : {&w, &w2}) {
    const QuantumState psi = m->make_state(random_unit(65, rng));
    for (double t : {0.3, 7.0, 40.0}) {
      CHECK((a_propagate(*m, psi, t).coeffs() - dense_flow(m->coupling().matrix(), psi.coeffs(), t)).norm() < 1e-12);
    }
  }
}

TEST_CASE("dense strategy flow") {
  std::mt19937_64 rng(14);
  BandMatrix a(10, 2);
  for (Index i = 0; i < 10; ++i) {
    a.ref(i, i) = 0.1 * i;
    if (i + 2 < 10) {
      a.ref(i, i + 2) = {0.2, 0.1};
      a.ref(i + 2, i) = {0.2, -0.1};
    }
  }
  std::vector<double> ladder;
  for (int n = 0; n < 10; ++n) ladder.push_back(n + 1.0);
  const SpectralModel d = build_dense_model("stub", ladder, a);
  const QuantumState psi = d.make_state(random_unit(10, rng));
  const Eigen::MatrixXcd u = (Eigen::MatrixXcd(a.to_dense()) * cplx{0.0, -3.0}).exp();
  CHECK((a_propagate(d, psi, 3.0).coeffs() - u * psi.coeffs()).norm() < 1e-12);
}

TEST_CASE("oracle preserves every K0 norm of the A flow") {
  std::mt19937_64 rng(15);
  const SpectralModel h = build_harmonic(64, 0.25);
  const QuantumState psi = h.make_state(random_unit(64, rng));
  for (double t : {0.5, 3.0}) {
    const QuantumState a = a_propagate(h, psi, t);
    const QuantumState o = oracle_propagate(h, psi, t);
    for (double r : {0.0, 1.0, 2.0, 2.5}) {
      CHECK(sobolev_norm(o, h, r) == doctest::Approx(sobolev_norm(a, h, r)).epsilon(1e-14));
    }
  }
}

TEST_CASE("oracle solves the non-autonomous equation") {
  // central difference of psi(t) against -i H(t) psi(t)
  const SpectralModel h = build_harmonic(48, 0.25);
  const QuantumState psi0 = h.basis_state(3);
  const double t = 2.2;
  const double eps = 1e-4;
  const Eigen::VectorXcd deriv =
      (oracle_propagate(h, psi0, t + eps).coeffs() - oracle_propagate(h, psi0, t - eps).coeffs()) / (2.0 * eps);
  const Eigen::VectorXcd rhs = cplx{0.0, -1.0} * apply_hamiltonian(h, oracle_propagate(h, psi0, t), t).coeffs();
  CHECK((deriv - rhs).norm() < 1e-6);
}

TEST_CASE("time reversal returns the initial state") {
  std::mt19937_64 rng(16);
  const SpectralModel models[] = {build_harmonic(80, 0.25), build_halfwave(40, 0.5, cosine_potential(0.25)),
                                  build_zoll_surrogate(40, 1.0, cosine_potential(0.25))};
  for (const SpectralModel& m : models) {
    const QuantumState psi0 = m.make_state(random_unit(m.size(), rng));
    for (double t : {1.0, 17.3}) {
      const QuantumState forward = oracle_propagate(m, psi0, t);
      const QuantumState back = oracle_propagate_between(m, forward, t, 0.0);
      CHECK((back.coeffs() - psi0.coeffs()).norm() < 1e-10);
      // U(t, s) U(s, 0) = U(t, 0)
      const QuantumState mid = oracle_propagate(m, psi0, 0.4 * t);
      CHECK(rel_error(oracle_propagate_between(m, mid, 0.4 * t, t), forward) < 1e-12);
    }
  }
}

TEST_CASE("krylov exponential against dense") {
  std::mt19937_64 rng(17);
  const SpectralModel h = build_harmonic(300, 0.25);
  const BandMatrix hm = hamiltonian_matrix(h, 0.9);
  const Eigen::VectorXcd v = random_unit(300, rng);
  const Eigen::MatrixXcd u = (Eigen::MatrixXcd(hm.to_dense()) * cplx{0.0, -0.05}).exp();
  const Eigen::VectorXcd got = krylov_expm_apply(hm, v, 0.05);
  CHECK((got - u * v).norm() < 1e-11);
  // a step far too large for one Krylov space forces substepping
  const Eigen::MatrixXcd u_big = (Eigen::MatrixXcd(hm.to_dense()) * cplx{0.0, -3.0}).exp();
  CHECK((krylov_expm_apply(hm, v, 3.0) - u_big * v).norm() < 1e-9);
}

TEST_CASE("steppers are exact for A = 0") {
  std::mt19937_64 rng(18);
  std::vector<double> ladder;
  for (int n = 0; n < 12; ++n) ladder.push_back(n + 0.5);
  const SpectralModel free = build_dense_model("free", ladder, BandMatrix(12, 0));
  const QuantumState psi = free.make_state(random_unit(12, rng));
  const double dt = 0.37;
  Eigen::VectorXcd expected(12);
  for (Index n = 0; n < 12; ++n) expected[n] = std::polar(1.0, -dt * ladder[n]) * psi[n];
  CHECK((step_magnus_midpoint(free, psi, 1.1, dt).coeffs() - expected).norm() < 1e-14);
  ExponentialOptions dense;
  dense.method = ExpMethod::dense;
  CHECK((step_magnus_midpoint(free, psi, 1.1, dt, dense).coeffs() - expected).norm() < 1e-14);
  CHECK((step_strang(free, psi, 1.1, dt).coeffs() - expected).norm() < 1e-14);
}

TEST_CASE("strang is exact for a diagonal A") {
  std::mt19937_64 rng(19);
  std::vector<double> ladder;
  std::vector<double> adiag;
  for (int n = 0; n < 12; ++n) {
    ladder.push_back(n + 1.0);
    adiag.push_back(std::sin(n));
  }
  const SpectralModel m = build_dense_model("diag", ladder, BandMatrix::diagonal(adiag));
  const QuantumState psi = m.make_state(random_unit(12, rng));
  const double dt = 0.9;
  Eigen::VectorXcd expected(12);
  for (Index n = 0; n < 12; ++n) expected[n] = std::polar(1.0, -dt * (ladder[n] + adiag[n])) * psi[n];
  CHECK((step_strang(m, psi, 0.2, dt).coeffs() - expected).norm() < 1e-14);
}

TEST_CASE("strang with the exact V factor reproduces the oracle") {
  // exp(-i dt/2 K0) e^{-isK0} e^{-i dt A} e^{isK0} exp(-i dt/2 K0) with
  // s = t + dt/2 collapses to U(t + dt, t): the splitting has no error.
  const SpectralModel h = build_harmonic(256, 0.25);
  const QuantumState psi0 = h.basis_state(0);
  const double t = 1.7;
  const QuantumState at_t = oracle_propagate(h, psi0, t);
  for (double dt : {0.5, 0.05}) {
    CHECK(rel_error(step_strang(h, at_t, t, dt), oracle_propagate(h, psi0, t + dt)) < 1e-13);
  }
  CHECK(final_error(h, psi0, Scheme::strang, 2.0 * kPi / 250.0) < 1e-11);
}

TEST_CASE("magnus midpoint converges at second order") {
  const SpectralModel h = build_harmonic(256, 0.25);
  const QuantumState psi0 = h.basis_state(0);
  const double e1 = final_error(h, psi0, Scheme::magnus_midpoint, 2.0 * kPi / 250.0);
  const double e2 = final_error(h, psi0, Scheme::magnus_midpoint, 2.0 * kPi / 500.0);
  const double e3 = final_error(h, psi0, Scheme::magnus_midpoint, 2.0 * kPi / 1000.0);
  CHECK(e3 <= 1e-4);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("stepper norm drift over 1000 steps") {
  const SpectralModel h = build_harmonic(256, 0.25);
  const QuantumState psi0 = h.basis_state(5);
  for (Scheme s : {Scheme::magnus_midpoint, Scheme::strang}) {
    PropagationPlan plan;
    plan.scheme = s;
    plan.t_end = 2.0 * kPi;
    plan.sample_times = {0.0, 0.5 * kPi, kPi, 2.0 * kPi};
    const Trajectory tr = propagate(h, psi0, plan);
    REQUIRE(tr.samples.size() == 4);
    for (const auto& sample : tr.samples) CHECK(std::abs(sample.state.norm() - 1.0) <= 1e-10);
  }
  // single step drift
  const QuantumState one = step_magnus_midpoint(h, psi0, 0.0, 2.0 * kPi / 1000.0);
  CHECK(std::abs(one.norm() - 1.0) <= 1e-12);
}

TEST_CASE("propagate records samples") {
  const SpectralModel h = build_harmonic(64, 0.25);
  const QuantumState psi0 = h.basis_state(0);
  PropagationPlan plan;
  plan.t_end = 1.0;
  plan.sample_times = {0.0};
  const Trajectory tr = propagate(h, psi0, plan);
  REQUIRE(tr.samples.size() == 1);
  CHECK(tr.samples[0].t == 0.0);
  CHECK((tr.samples[0].state.coeffs() - psi0.coeffs()).norm() == 0.0);

  const SpectralModel big = build_harmonic(256, 0.25);
  const QuantumState b0 = big.basis_state(0);
  PropagationPlan mp;
  mp.scheme = Scheme::magnus_midpoint;
  mp.t_end = 2.0 * kPi;
  mp.sample_times = {2.0 * kPi};
  const Trajectory m = propagate(big, b0, mp);
  CHECK(rel_error(m.samples.back().state, oracle_propagate(big, b0, 2.0 * kPi)) <= 1e-4);
}

TEST_CASE("default sample times") {
  const auto ts = default_sample_times(1000.0);
  REQUIRE(ts.size() == 65);
  CHECK(ts.front() == 0.0);
  CHECK(ts[1] == 1.0);
  CHECK(ts.back() == 1000.0);
  for (std::size_t k = 1; k < ts.size(); ++k) CHECK(ts[k] > ts[k - 1]);
  CHECK(ts[2] / ts[1] == doctest::Approx(ts[33] / ts[32]));
}

TEST_CASE("plan validation") {
  const SpectralModel h = build_harmonic(64, 0.25);
  auto code_of = [&](PropagationPlan p, bool allow = false) {
    try {
      validate_plan(p, h, allow);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  PropagationPlan p;
  p.t_end = 10.0;
  p.sample_times = {0.0, 5.0, 10.0};
  CHECK(code_of(p) == ErrorCode::invalid_parameter);  // N-rule: needs 138
  CHECK(code_of(p, true) == ErrorCode::io);
  p.sample_times = {0.0, 5.0, 11.0};
  CHECK(code_of(p, true) == ErrorCode::invalid_parameter);
  p.sample_times = {0.0, 5.0, 5.0};
  CHECK(code_of(p, true) == ErrorCode::invalid_parameter);
  p.sample_times = {0.0, 0.001, 10.0};
  CHECK(code_of(p, true) == ErrorCode::invalid_parameter);
  p.sample_times = {0.0, 10.0};
  p.dt = 0.0;
  CHECK(code_of(p, true) == ErrorCode::invalid_parameter);
}

TEST_CASE("leakage abort") {
  const SpectralModel h = build_harmonic(64, 0.25);
  PropagationPlan p;
  p.t_end = 200.0;
  p.sample_times = {0.0, 100.0, 200.0};
  try {
    propagate(h, h.basis_state(0), p);
    FAIL("expected leakage abort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::leakage_abort);
  }
  p.abort_on_leakage = false;
  CHECK(propagate(h, h.basis_state(0), p).samples.size() == 3);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "normgrowth/diagnostics.hpp"
#include "normgrowth/errors.hpp"
#include "normgrowth/models.hpp"
#include "normgrowth/propagators.hpp"

using namespace normgrowth;

namespace {

GrowthRecord synthetic(const std::function<double(double)>& f) {
  GrowthRecord rec;
  rec.orders = {1.0};
  for (double t : default_sample_times(1000.0)) rec.add({t, {f(t)}, 0.0, std::nullopt});
  return rec;
}

}  // namespace

TEST_CASE("fit of exact power laws") {
  const FitReport p = fit_growth_exponent(synthetic([](double t) { return 3.0 * t * t; }), 1.0, {100.0, 1000.0});
  CHECK(std::abs(p.slope - 2.0) < 1e-12);
  CHECK(p.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(p.residual < 1e-12);
  CHECK(p.ceiling == 1.0);
  CHECK(p.samples >= 8);

  const FitReport c = fit_growth_exponent(synthetic([](double) { return 2.5; }), 1.0, {100.0, 1000.0});
  CHECK(std::abs(c.slope) < 1e-12);

  CHECK(fit_growth_exponent(synthetic([](double t) { return t; }), 1.0, {100.0, 1000.0}, 0.5).ceiling == 2.0);
}

TEST_CASE("fit errors") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  CHECK(code_of([] { fit_growth_exponent(synthetic([](double t) { return t; }), 1.0, {500.0, 600.0}); }) ==
        ErrorCode::empty_window);
  CHECK(code_of([] { fit_growth_exponent(synthetic([](double) { return 0.0; }), 1.0, {100.0, 1000.0}); }) ==
        ErrorCode::degenerate_norm);
  CHECK(code_of([] { fit_growth_exponent(synthetic([](double t) { return t; }), 3.0, {100.0, 1000.0}); }) ==
        ErrorCode::invalid_parameter);
}

TEST_CASE("record invariants") {
  GrowthRecord rec;
  rec.orders = {1.0};
  rec.add({1.0, {1.0}, 0.0, std::nullopt});
  CHECK_THROWS_AS(rec.add({1.0, {1.0}, 0.0, std::nullopt}), Error);
  CHECK_THROWS_AS(rec.add({2.0, {1.0}, 1.5, std::nullopt}), Error);
  CHECK_THROWS_AS(rec.add({2.0, {1.0, 2.0}, 0.0, std::nullopt}), Error);
}

TEST_CASE("truncation leakage") {
  const SpectralModel h = build_harmonic(100, 0.25);
  CHECK(truncation_leakage(h.basis_state(0), 0.1) == 0.0);
  const QuantumState uniform = h.make_state(Eigen::VectorXcd::Constant(100, 0.1));
  CHECK(truncation_leakage(uniform, 0.1) == doctest::Approx(0.1));
  const SpectralModel odd = build_harmonic(95, 0.25);
  const double l = truncation_leakage(odd.make_state(Eigen::VectorXcd::Constant(95, 1.0)), 0.1);
  CHECK(std::abs(l - 0.1) <= 1.0 / 95.0);
  CHECK_THROWS_AS(truncation_leakage(uniform, 0.5), Error);
  CHECK_THROWS_AS(truncation_leakage(uniform, 0.0), Error);
}

TEST_CASE("harmonic growth run") {
  const SpectralModel h = build_harmonic(minimum_modes(0.25, 1000.0), 0.25);
  PropagationPlan plan;
  plan.t_end = 1000.0;
  plan.sample_times = default_sample_times(1000.0);
  const Trajectory tr = propagate(h, h.basis_state(0), plan);
  GrowthRecord rec;
  GrowthRecord scaled;
  rec.orders = scaled.orders = {1.0, 2.0};
  double leak = 0.0;
  for (const auto& s : tr.samples) {
    const double l = truncation_leakage(s.state, 0.1);
    leak = std::max(leak, l);
    rec.add({s.t, {sobolev_norm(s.state, h, 1.0), sobolev_norm(s.state, h, 2.0)}, l, std::nullopt});
    const QuantumState c = h.make_state(s.state.coeffs() * 3.7);
    scaled.add({s.t, {sobolev_norm(c, h, 1.0), sobolev_norm(c, h, 2.0)}, l, std::nullopt});
  }
  CHECK(leak < 1e-10);
  const FitWindow w{100.0, 1000.0};
  const FitReport f1 = fit_growth_exponent(rec, 1.0, w);
  CHECK(f1.slope >= 0.9);
  CHECK(f1.slope <= 1.1);
  CHECK(f1.slope <= f1.ceiling + 0.1);
  CHECK(std::abs(fit_growth_exponent(scaled, 1.0, w).slope - f1.slope) < 1e-12);
  CHECK(std::abs(fit_growth_exponent(scaled, 2.0, w).slope - fit_growth_exponent(rec, 2.0, w).slope) < 1e-12);
  CHECK(default_fit_window(rec).t_min == 100.0);
  CHECK(default_fit_window(rec).t_max == 1000.0);
}

TEST_CASE("chodosh verdicts") {
  const IndexedMatrix a = [](Index m, Index n) { return cplx{std::abs(m - n) == 1 ? 1.0 : 0.0, 0.0}; };
  const IndexedMatrix k0 = [](Index m, Index n) { return cplx{m == n ? m + 0.5 : 0.0, 0.0}; };
  const IndexedMatrix ones = [](Index, Index) { return cplx{1.0, 0.0}; };

  const SymbolMatrixReport ra = chodosh_order_check(a, 0.0);
  CHECK(ra.consistent);
  CHECK(ra.verdict() == "consistent with order 0");
  for (const ChodoshConstant& c : ra.constants) {
    CHECK(c.constant >= 0.0);
    CHECK(std::isfinite(c.constant));
    if (c.gamma >= 1) {
      CHECK(c.constant == 0.0);
      CHECK(c.constant_doubled <= c.constant);
    }
  }
  CHECK(ra.constants.size() == 4 * 5);

  const SymbolMatrixReport rk = chodosh_order_check(k0, 1.0);
  CHECK(rk.verdict() == "consistent with order 1");

  const SymbolMatrixReport ro = chodosh_order_check(ones, 0.0);
  CHECK_FALSE(ro.consistent);
  CHECK(ro.verdict() == "not consistent with order 0");
  for (const ChodoshConstant& c : ro.constants) {
    if (c.gamma == 0 && c.decay >= 1) CHECK_FALSE(c.stable);
  }

  // K0 grows too fast for order 0
  CHECK_FALSE(chodosh_order_check(k0, 0.0).consistent);
  CHECK_THROWS_AS(chodosh_order_check(a, 0.0, 3, 4, 32), Error);
}

TEST_CASE("egorov rotation") {
  const Symbol a = [](double x, double xi) { return x * x * x - 2.0 * xi + x * xi; };
  std::vector<double> grid;
  for (int k = -8; k <= 8; ++k) grid.push_back(0.5 * k);
  const SampledSymbol id = egorov_rotated_symbol(a, grid, grid, 0.0);
  const SampledSymbol per = egorov_rotated_symbol(a, grid, grid, 2.0 * std::numbers::pi);
  const SampledSymbol quarter = egorov_rotated_symbol(a, grid, grid, std::numbers::pi / 2.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(id.values[i][k] == a(grid[i], grid[k]));
      CHECK(std::abs(per.values[i][k] - a(grid[i], grid[k])) < 1e-12);
      CHECK(std::abs(quarter.values[i][k] - a(grid[k], -grid[i])) < 1e-12);
    }
  }

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double s = u(rng);
    const double t = u(rng);
    const Symbol at = [&](double x, double xi) {
      return a(x * std::cos(t) + xi * std::sin(t), -x * std::sin(t) + xi * std::cos(t));
    };
    const SampledSymbol lhs = egorov_rotated_symbol(at, grid, grid, s);
    const SampledSymbol rhs = egorov_rotated_symbol(a, grid, grid, s + t);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(std::abs(lhs.values[i][k] - rhs.values[i][k]) < 1e-11 * (1.0 + std::abs(rhs.values[i][k])));
  }

  CHECK_THROWS_AS(egorov_rotated_symbol(a, {0.0, 1.0}, grid, 0.3), Error);
}

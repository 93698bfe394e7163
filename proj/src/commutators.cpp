#include "normgrowth/commutators.hpp"

#include <cmath>
#include <cstdint>
#include <functional>

#include "compensated.hpp"
#include "normgrowth/errors.hpp"

namespace normgrowth {

namespace {

void require_depth(const SpectralModel& model, Index depth, const char* what) {
  const Index b = model.coupling().bandwidth();
  if (4 * depth * b >= model.size()) {
    throw Error(ErrorCode::window_exhausted, std::string(what) + ": depth " + std::to_string(depth) +
                                                 " x bandwidth " + std::to_string(b) + " must stay below N/4 = " +
                                                 std::to_string(model.size() / 4));
  }
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

// <X psi, psi> = sum_n conj(psi_n) (X psi)_n with compensated accumulation.
cplx expectation(const BandMatrix& x, const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd xpsi = x.apply(psi);
  detail::CompensatedSum re;
  detail::CompensatedSum im;
  for (Index n = 0; n < psi.size(); ++n) {
    const cplx term = std::conj(psi[n]) * xpsi[n];
    re.add(term.real());
    im.add(term.imag());
  }
  return {re.value(), im.value()};
}

BandMatrix k0_power(const SpectralModel& model, int power) {
  std::vector<double> diag(model.ladder().values().begin(), model.ladder().values().end());
  for (double& v : diag) v = std::pow(v, power);
  return BandMatrix::diagonal(diag);
}

}  // namespace

RowWindow interior_window(const SpectralModel& model, Index depth) {
  const Index margin = model.coupling().bandwidth() * depth;
  return {margin, model.size() - 1 - margin};
}

BandMatrix reference_operator(const SpectralModel& model, Reference reference) {
  if (reference == Reference::surrogate && model.fourier()) {
    std::vector<double> signed_index;
    for (int j : model.fourier()->mode_index) signed_index.push_back(static_cast<double>(j));
    return BandMatrix::diagonal(signed_index);
  }
  return BandMatrix::diagonal(model.ladder().values());
}

CommutatorChain commutator_chain(const SpectralModel& model, int jmax, Reference reference) {
  if (jmax < 0) throw Error(ErrorCode::invalid_parameter, "jmax must be >= 0");
  require_depth(model, jmax, "commutator chain");
  CommutatorChain chain;
  chain.coupling_bandwidth = model.coupling().bandwidth();
  chain.interior = interior_window(model, jmax);
  const BandMatrix& a = model.coupling().matrix();
  chain.terms.push_back(reference_operator(model, reference));
  for (int j = 1; j <= jmax; ++j) chain.terms.push_back(commutator(a, chain.terms.back()).trimmed());
  return chain;
}

BandMatrix iterated_commutator(const SpectralModel& model, int j, Reference reference) {
  return commutator_chain(model, j, reference).terms.back();
}

NilpotencyReport verify_nilpotency(const SpectralModel& model, int n_max, bool use_surrogate_k) {
  const Reference reference = use_surrogate_k ? Reference::surrogate : Reference::k0;
  const BandMatrix& a = model.coupling().matrix();
  const double a_scale = a.max_abs();
  const std::string k_name = reference == Reference::surrogate && model.fourier() ? "D" : "K0";
  NilpotencyReport report;
  BandMatrix term = reference_operator(model, reference);
  report.interior_max.push_back(term.max_abs());

  for (int j = 1; j <= n_max + 1; ++j) {
    const Index b = model.coupling().bandwidth();
    if (4 * static_cast<Index>(j) * b >= model.size()) {
      report.description = "none up to depth " + std::to_string(j - 1) + " (interior window exhausted)";
      return report;
    }
    const RowWindow prev = interior_window(model, j - 1);
    const double scale = 2.0 * a_scale * term.max_abs_in_rows(prev.first, prev.last);
    term = commutator(a, term).trimmed();
    const RowWindow window = interior_window(model, j);
    const double m = term.max_abs_in_rows(window.first, window.last);
    report.interior_max.push_back(m);
    if (m <= 1e-13 * scale) {
      report.n_star = j - 1;
      report.exact = m == 0.0;
      report.no_growth = j == 1;
      if (report.no_growth) {
        report.description = "N* = 0 case: [A, " + k_name + "] = 0 (no growth)";
      } else {
        report.description = "N* = " + std::to_string(j - 1) + ": ad_A^" + std::to_string(j) +
                             "(" + k_name + ") vanishes on interior rows" + (report.exact ? " exactly" : "");
      }
      return report;
    }
  }
  report.description = "none up to N_max = " + std::to_string(n_max);
  return report;
}

AdPowerRoutes ad_power_routes(const SpectralModel& model, int M, int r) {
  if (M < 0 || r < 0) throw Error(ErrorCode::invalid_parameter, "M and r must be >= 0");
  require_depth(model, 2 * static_cast<Index>(r) * M, "ad power expansion");
  const BandMatrix& a = model.coupling().matrix();
  const Index n = model.size();
  const int parts = 2 * r;

  AdPowerRoutes routes;
  routes.interior = interior_window(model, M);

  routes.direct = k0_power(model, parts);
  for (int k = 0; k < M; ++k) routes.direct = commutator(a, routes.direct).trimmed();

  std::vector<BandMatrix> chain;
  chain.push_back(reference_operator(model));
  for (int k = 1; k <= M; ++k) chain.push_back(commutator(a, chain.back()).trimmed());

  routes.multinomial = BandMatrix(n, 0);
  if (parts == 0) {
    if (M == 0) routes.multinomial = BandMatrix::identity(n);
  } else {
    std::vector<int> ks(static_cast<std::size_t>(parts), 0);
    const std::uint64_t m_fact = factorial(M);
    std::function<void(int, int)> visit = [&](int slot, int remaining) {
      if (slot == parts - 1) {
        ks[slot] = remaining;
        std::uint64_t denom = 1;
        for (int k : ks) denom *= factorial(k);
        BandMatrix product = chain[ks[0]];
        for (int p = 1; p < parts; ++p) product = product * chain[ks[p]];
        routes.multinomial += product * cplx{static_cast<double>(m_fact / denom), 0.0};
        return;
      }
      for (int k = 0; k <= remaining; ++k) {
        ks[slot] = k;
        visit(slot + 1, remaining - k);
      }
    };
    visit(0, M);
  }
  routes.multinomial = routes.multinomial.trimmed();

  const double scale = routes.direct.max_abs_in_rows(routes.interior.first, routes.interior.last);
  const double diff = (routes.direct - routes.multinomial).max_abs_in_rows(routes.interior.first, routes.interior.last);
  routes.discrepancy = scale > 0.0 ? diff / scale : diff;
  return routes;
}

BandMatrix expand_ad_power(const SpectralModel& model, int M, int r) {
  AdPowerRoutes routes = ad_power_routes(model, M, r);
  if (routes.discrepancy > 1e-10) {
    throw Error(ErrorCode::invariant_violation, "direct and multinomial ad_A^" + std::to_string(M) + "(K0^" +
                                                    std::to_string(2 * r) + ") disagree by " +
                                                    std::to_string(routes.discrepancy));
  }
  return std::move(routes.direct);
}

double LiePolynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
  return acc;
}

namespace {

int nilpotency_index(const SpectralModel& model) {
  const NilpotencyReport report = verify_nilpotency(model, 8);
  if (!report.n_star) throw Error(ErrorCode::not_nilpotent, report.description);
  return *report.n_star;
}

}  // namespace

LiePolynomial lie_polynomial(const SpectralModel& model, const QuantumState& psi0, int r) {
  require_compatible(psi0, model);
  if (r < 0) throw Error(ErrorCode::invalid_parameter, "r must be >= 0");
  const int n_star = nilpotency_index(model);
  const int degree = 2 * r * n_star;
  const Index b = model.coupling().bandwidth();
  const Index margin = static_cast<Index>(degree) * b + b;

  const Eigen::VectorXcd& psi = psi0.coeffs();
  Index lo = psi.size();
  Index hi = -1;
  for (Index n = 0; n < psi.size(); ++n) {
    if (psi[n] != cplx{0.0, 0.0}) {
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
  }
  if (hi < 0) throw Error(ErrorCode::degenerate_initial_state, "initial state is zero");
  if (lo < margin || hi > psi.size() - 1 - margin) {
    throw Error(ErrorCode::support_violation, "initial state support [" + std::to_string(lo) + ", " +
                                                  std::to_string(hi) + "] must keep distance " +
                                                  std::to_string(margin) + " from both ends");
  }
  require_depth(model, degree, "Lie expansion");

  LiePolynomial poly;
  poly.r = r;
  poly.n_star = n_star;
  const BandMatrix& a = model.coupling().matrix();
  BandMatrix term = k0_power(model, 2 * r);
  std::vector<cplx> raw;
  cplx i_power{1.0, 0.0};
  for (int m = 0; m <= degree; ++m) {
    if (m > 0) {
      term = commutator(a, term).trimmed();
      i_power *= cplx{0.0, 1.0};
    }
    raw.push_back(i_power * expectation(term, psi) / static_cast<double>(factorial(m)));
  }
  double scale = 0.0;
  for (const cplx& c : raw) scale = std::max(scale, std::abs(c));
  for (int m = 0; m <= degree; ++m) {
    if (std::abs(raw[m].imag()) > 1e-12 * scale) {
      throw Error(ErrorCode::invariant_violation,
                  "Lie coefficient " + std::to_string(m) + " has imaginary residue " + std::to_string(raw[m].imag()));
    }
    poly.coefficients.push_back(raw[m].real());
  }
  return poly;
}

double lie_norm_expansion(const SpectralModel& model, const QuantumState& psi0, int r, double t) {
  return lie_polynomial(model, psi0, r)(t);
}

double growth_lower_constant(const SpectralModel& model, const QuantumState& psi0, int r) {
  require_compatible(psi0, model);
  if (r < 0) throw Error(ErrorCode::invalid_parameter, "r must be >= 0");
  const int n_star = nilpotency_index(model);
  if (n_star == 0) throw Error(ErrorCode::not_nilpotent, "[A, K0] = 0: the flow of A produces no growth");
  const BandMatrix top = iterated_commutator(model, n_star);
  Eigen::VectorXcd y = psi0.coeffs();
  for (int k = 0; k < r; ++k) y = top.apply(y);
  const double bound = std::pow(top.max_abs() * static_cast<double>(2 * top.bandwidth() + 1), r) * psi0.norm();
  if (!(y.norm() > 1e-12 * bound)) {
    throw Error(ErrorCode::degenerate_initial_state,
                "hypothesis [ad_A^N(K0)]^r psi0 != 0 fails for N = " + std::to_string(n_star) +
                    ", r = " + std::to_string(r));
  }
  return lie_polynomial(model, psi0, r).coefficients.back();
}

}  // namespace normgrowth

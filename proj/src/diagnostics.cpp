#include "normgrowth/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "normgrowth/errors.hpp"

namespace normgrowth {

void GrowthRecord::add(GrowthRow row) {
  if (!rows.empty() && !(row.t > rows.back().t)) {
    throw Error(ErrorCode::invariant_violation, "growth record times must be strictly increasing");
  }
  if (!(row.leakage >= 0.0 && row.leakage <= 1.0)) {
    throw Error(ErrorCode::invariant_violation, "leakage must lie in [0, 1]");
  }
  if (row.norms.size() != orders.size()) {
    throw Error(ErrorCode::dimension_mismatch, "row has a different number of norms than orders");
  }
  rows.push_back(std::move(row));
}

FitWindow default_fit_window(const GrowthRecord& record) {
  if (record.rows.empty()) throw Error(ErrorCode::empty_window, "record has no rows");
  const double t_end = record.rows.back().t;
  return {t_end / 10.0, t_end};
}

FitReport fit_growth_exponent(const GrowthRecord& record, double r, FitWindow window, double rho) {
  const auto it = std::find(record.orders.begin(), record.orders.end(), r);
  if (it == record.orders.end()) {
    throw Error(ErrorCode::invalid_parameter, "order r = " + std::to_string(r) + " not recorded");
  }
  const auto col = static_cast<std::size_t>(it - record.orders.begin());
  std::vector<double> xs;
  std::vector<double> ys;
  for (const GrowthRow& row : record.rows) {
    if (row.t < window.t_min || row.t > window.t_max) continue;
    const double norm = row.norms[col];
    if (!(norm > 0.0) || !(row.t > 0.0)) {
      throw Error(ErrorCode::degenerate_norm, "non-positive norm or time at t = " + std::to_string(row.t));
    }
    xs.push_back(std::log(row.t));
    ys.push_back(std::log(norm));
  }
  if (xs.size() < 8) {
    throw Error(ErrorCode::empty_window, "fit window [" + std::to_string(window.t_min) + ", " +
                                             std::to_string(window.t_max) + "] holds " + std::to_string(xs.size()) +
                                             " samples, need >= 8");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::empty_window, "fit window spans a single time");

  FitReport report;
  report.r = r;
  report.slope = sxy / sxx;
  report.intercept = my - report.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - (report.intercept + report.slope * xs[k]);
    ss += e * e;
  }
  report.residual = std::sqrt(ss / n);
  report.window = window;
  report.samples = static_cast<int>(xs.size());
  report.ceiling = r / (1.0 - rho);
  return report;
}

double truncation_leakage(const QuantumState& state, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 0.5)) {
    throw Error(ErrorCode::invalid_parameter, "tail fraction must lie in (0, 0.5)");
  }
  const Index n = state.size();
  const Index tail = std::max<Index>(1, static_cast<Index>(std::ceil(tail_fraction * static_cast<double>(n))));
  const double total = state.coeffs().squaredNorm();
  if (total == 0.0) return 0.0;
  const double mass = state.coeffs().tail(tail).squaredNorm();
  return std::clamp(mass / total, 0.0, 1.0);
}

std::string SymbolMatrixReport::verdict() const {
  auto fmt = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return std::string(buf);
  };
  return (consistent ? "consistent with order " : "not consistent with order ") + fmt(rho);
}

namespace {

// (Delta^gamma M)(m, n) = sum_k (-1)^{gamma-k} binom(gamma, k) M(m+k, n+k)
cplx iterated_difference(const IndexedMatrix& matrix, Index m, Index n, int gamma) {
  cplx sum{0.0, 0.0};
  double binom = 1.0;
  for (int k = 0; k <= gamma; ++k) {
    const double sign = (gamma - k) % 2 == 0 ? 1.0 : -1.0;
    sum += sign * binom * matrix(m + k, n + k);
    binom = binom * (gamma - k) / (k + 1);
  }
  return sum;
}

}  // namespace

SymbolMatrixReport chodosh_order_check(const IndexedMatrix& matrix, double rho, int gamma_max, int decay_max,
                                       int domain_cap) {
  if (domain_cap < 64) throw Error(ErrorCode::invalid_parameter, "domain_cap must be >= 64");
  if (gamma_max < 0 || decay_max < 0) throw Error(ErrorCode::invalid_parameter, "gamma_max and N_max must be >= 0");
  SymbolMatrixReport report;
  report.rho = rho;
  report.gamma_max = gamma_max;
  report.decay_max = decay_max;
  report.domain_cap = domain_cap;

  const Index big = 2 * static_cast<Index>(domain_cap);
  for (int gamma = 0; gamma <= gamma_max; ++gamma) {
    // constants[decay] over the base and doubled domains
    std::vector<double> base(static_cast<std::size_t>(decay_max + 1), 0.0);
    std::vector<double> doubled(base.size(), 0.0);
    for (Index m = 0; m < big; ++m) {
      for (Index n = 0; n < big; ++n) {
        const double diff = std::abs(iterated_difference(matrix, m, n, gamma));
        if (diff == 0.0) continue;
        const double growth = std::pow(1.0 + static_cast<double>(m + n), rho - gamma);
        const double sep = 1.0 + static_cast<double>(std::abs(m - n));
        double weight = diff / growth;
        for (int decay = 0; decay <= decay_max; ++decay) {
          doubled[decay] = std::max(doubled[decay], weight);
          if (m < domain_cap && n < domain_cap) base[decay] = std::max(base[decay], weight);
          weight *= sep;
        }
      }
    }
    for (int decay = 0; decay <= decay_max; ++decay) {
      ChodoshConstant c;
      c.gamma = gamma;
      c.decay = decay;
      c.constant = base[decay];
      c.constant_doubled = doubled[decay];
      c.stable = c.constant_doubled == 0.0 ||
                 (c.constant > 0.0 && c.constant_doubled < report.stability_ratio * c.constant);
      report.constants.push_back(c);
    }
  }
  report.consistent = std::all_of(report.constants.begin(), report.constants.end(),
                                  [](const ChodoshConstant& c) { return c.stable; });
  return report;
}

SampledSymbol egorov_rotated_symbol(const Symbol& a, const std::vector<double>& xs, const std::vector<double>& xis,
                                    double t) {
  auto symmetric = [](const std::vector<double>& g) {
    if (g.empty()) return false;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(g[i] + g[g.size() - 1 - i]) > 1e-12 * std::max(1.0, std::abs(g[i]))) return false;
    return std::is_sorted(g.begin(), g.end());
  };
  if (!symmetric(xs) || !symmetric(xis)) {
    throw Error(ErrorCode::invalid_parameter, "symbol grid must be sorted and symmetric about the origin");
  }
  const double c = std::cos(t);
  const double s = std::sin(t);
  SampledSymbol out{xs, xis, {}};
  out.values.assign(xs.size(), std::vector<double>(xis.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t k = 0; k < xis.size(); ++k)
      out.values[i][k] = a(xs[i] * c + xis[k] * s, -xs[i] * s + xis[k] * c);
  return out;
}

}  // namespace normgrowth

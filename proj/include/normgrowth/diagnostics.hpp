#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "normgrowth/spectral.hpp"

namespace normgrowth {

struct GrowthRow {
  double t = 0.0;
  /// One entry per GrowthRecord::orders.
  std::vector<double> norms;
  double leakage = 0.0;
  std::optional<double> oracle_error;
};

struct GrowthRecord {
  std::string model;
  std::string scheme;
  std::vector<double> orders;
  std::vector<GrowthRow> rows;

  /// Appends a row, enforcing strictly increasing t and leakage in [0, 1].
  void add(GrowthRow row);
};

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

struct FitReport {
  double r = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double residual = 0.0;
  FitWindow window;
  int samples = 0;
  /// Upper-bound exponent r / (1 - rho) for an order-rho perturbation.
  double ceiling = 0.0;
};

/// Least-squares slope of log ||psi(t)||_r against log t for rows inside
/// the window. Needs at least 8 samples; any non-positive norm aborts with
/// degenerate_norm.
FitReport fit_growth_exponent(const GrowthRecord& record, double r, FitWindow window, double rho = 0.0);

/// Last decade [t_end / 10, t_end] of the record.
FitWindow default_fit_window(const GrowthRecord& record);

/// Fraction of Euclidean mass in the last ceil(tail_fraction * N) modes.
double truncation_leakage(const QuantumState& state, double tail_fraction);

/// Matrix on N0 x N0 given by its entries.
using IndexedMatrix = std::function<cplx(Index, Index)>;

struct ChodoshConstant {
  int gamma = 0;
  int decay = 0;
  /// Smallest C with |(Delta^gamma M)(m,n)| <= C (1+m+n)^{rho-gamma} / (1+|m-n|)^decay
  /// over m, n < domain_cap, and the same over the doubled domain.
  double constant = 0.0;
  double constant_doubled = 0.0;
  bool stable = false;
};

struct SymbolMatrixReport {
  double rho = 0.0;
  int gamma_max = 0;
  int decay_max = 0;
  int domain_cap = 0;
  double stability_ratio = 1.5;
  std::vector<ChodoshConstant> constants;
  bool consistent = false;

  std::string verdict() const;
};

/// Finite check of the symbol-matrix bounds for gamma <= gamma_max and decay
/// exponents <= decay_max. A (gamma, decay) pair is "stable" when its
/// constant grows by a factor below stability_ratio as the domain doubles.
/// This can support but never prove the order.
SymbolMatrixReport chodosh_order_check(const IndexedMatrix& matrix, double rho, int gamma_max = 3, int decay_max = 4,
                                       int domain_cap = 1024);

/// Samples of a symbol on a rectangular grid: values[i][k] = a(xs[i], xis[k]).
struct SampledSymbol {
  std::vector<double> xs;
  std::vector<double> xis;
  std::vector<std::vector<double>> values;
};

using Symbol = std::function<double(double, double)>;

/// a(x cos t + xi sin t, -x sin t + xi cos t) on the grid, evaluated in
/// closed form. Both axes must be symmetric about the origin.
SampledSymbol egorov_rotated_symbol(const Symbol& a, const std::vector<double>& xs, const std::vector<double>& xis,
                                    double t);

}  // namespace normgrowth

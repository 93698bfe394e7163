#include "normgrowth/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "normgrowth/commutators.hpp"
#include "normgrowth/errors.hpp"

namespace normgrowth {

const char* to_string(Suite suite) {
  switch (suite) {
    case Suite::growth: return "growth";
    case Suite::oracle_vs_stepper: return "oracle-vs-stepper";
    case Suite::commutator: return "commutator";
    case Suite::chodosh: return "chodosh";
    case Suite::egorov: return "egorov";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

[[noreturn]] void config_error(const std::string& key, const std::string& message) {
  throw Error(ErrorCode::config, key + ": " + message);
}

// Canonical spelling of accepted aliases.
std::string canonical_key(const std::string& key) {
  if (key == "t_end") return "tend";
  if (key == "m") return "mass";
  if (key == "N" || key == "J") return "modes";
  return key;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model", "modes", "delta", "epsilon", "mass", "lambda", "tend", "dt", "scheme", "orders", "suites", "out",
      "seed", "samples", "initial_mode", "override_nrule", "fit_tmin", "fit_tmax", "exp_method", "krylov_dim"};
  return keys;
}

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  std::optional<std::string> get(const std::string& key) const {
    const auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    return it->second;
  }

  double real(const std::string& key, double fallback, double lo, double hi, bool lo_open, bool hi_open,
              const std::string& range) {
    const auto text = get(key);
    if (!text) {
      defaults_.push_back(key + " = " + num(fallback, 17));
      return fallback;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size() || !std::isfinite(v)) {
      config_error(key, "'" + *text + "' is not a real number (valid range " + range + ")");
    }
    const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    if (!ok) config_error(key, num(v, 17) + " outside valid range " + range);
    return v;
  }

  long long integer(const std::string& key, long long fallback, long long lo, long long hi, const std::string& range) {
    const auto text = get(key);
    if (!text) {
      defaults_.push_back(key + " = " + std::to_string(fallback));
      return fallback;
    }
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size()) {
      config_error(key, "'" + *text + "' is not an integer (valid range " + range + ")");
    }
    if (v < lo || v > hi) config_error(key, std::to_string(v) + " outside valid range " + range);
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto text = get(key);
    if (!text) {
      defaults_.push_back(key + std::string(" = ") + (fallback ? "true" : "false"));
      return fallback;
    }
    if (*text == "true" || *text == "1" || *text == "yes") return true;
    if (*text == "false" || *text == "0" || *text == "no") return false;
    config_error(key, "'" + *text + "' is not a boolean (true/false)");
  }

  std::string word(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
    const auto text = get(key);
    if (!text) {
      defaults_.push_back(key + " = " + fallback);
      return fallback;
    }
    if (std::find(allowed.begin(), allowed.end(), *text) == allowed.end()) {
      std::string options;
      for (const auto& a : allowed) options += (options.empty() ? "" : "|") + a;
      config_error(key, "'" + *text + "' not one of " + options);
    }
    return *text;
  }

  std::vector<std::string> list(const std::string& key, const std::string& fallback) {
    auto text = get(key);
    if (!text) {
      defaults_.push_back(key + " = " + fallback);
      text = fallback;
    }
    std::vector<std::string> items;
    std::stringstream ss(*text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) items.push_back(item);
    }
    return items;
  }

  void note_default(const std::string& text) { defaults_.push_back(text); }
  std::vector<std::string> take_defaults() { return std::move(defaults_); }

 private:
  const RawConfig& raw_;
  std::vector<std::string> defaults_;
};

}  // namespace

RawConfig parse_config_text(std::string_view text) {
  RawConfig raw;
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find_first_of("=:");
    if (eq == std::string::npos) {
      throw Error(ErrorCode::config, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = canonical_key(trim(std::string_view(content).substr(0, eq)));
    std::string value = trim(std::string_view(content).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw Error(ErrorCode::config, "line " + std::to_string(lineno) + ": empty key");
    if (!raw.emplace(key, value).second) {
      throw Error(ErrorCode::config, "line " + std::to_string(lineno) + ": key '" + key + "' given twice");
    }
  }
  return raw;
}

RawConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ExperimentConfig validate_config(const RawConfig& raw_in) {
  RawConfig raw;
  for (const auto& [key, value] : raw_in) {
    const std::string k = canonical_key(key);
    if (!known_keys().count(k)) config_error(k, "unknown key");
    raw[k] = value;
  }
  Reader in(raw);
  ExperimentConfig cfg;

  const std::string model = in.word("model", "harmonic", {"harmonic", "halfwave", "zoll", "zoll-surrogate"});
  cfg.model.kind = model == "harmonic" ? ModelKind::harmonic
                   : model == "halfwave" ? ModelKind::halfwave
                                         : ModelKind::zoll_surrogate;
  const bool harmonic = cfg.model.kind == ModelKind::harmonic;

  if (harmonic) {
    if (auto d = in.get("delta"); d && std::strtod(d->c_str(), nullptr) == 0.0 && trim(*d).find_first_not_of("+-0.eE") == std::string::npos) {
      config_error("delta", "delta = 0 rejected: the coupling requires delta != 0 (valid range (0, 1])");
    }
    cfg.model.delta = in.real("delta", 0.25, 0.0, 1.0, true, false, "(0, 1]");
  } else {
    cfg.model.epsilon = in.real("epsilon", 0.25, 0.0, 1.0, true, false, "(0, 1]");
    if (cfg.model.kind == ModelKind::halfwave) {
      cfg.model.lambda = in.real("lambda", 0.5, 0.0, 1.0, true, true, "(0, 1)");
    } else {
      cfg.model.mass = in.real("mass", 1.0, 0.0, 10.0, true, false, "(0, 10]");
    }
  }

  const double tend = in.real("tend", 1000.0, 1.0, 1e7, true, false, "(1, 1e7]");
  const double coupling = harmonic ? cfg.model.delta : potential_bound(cosine_potential(cfg.model.epsilon));
  cfg.nrule_minimum = minimum_modes(coupling, tend);
  cfg.override_nrule = in.boolean("override_nrule", false);

  const Index rule_modes = harmonic ? cfg.nrule_minimum : (cfg.nrule_minimum - 1 + 1) / 2;
  if (in.get("modes")) {
    cfg.model.modes = static_cast<Index>(
        in.integer("modes", 0, harmonic ? 8 : 4, 1 << 24, harmonic ? "[8, 2^24]" : "[4, 2^24]"));
    const Index n = harmonic ? cfg.model.modes : 2 * cfg.model.modes + 1;
    if (n < cfg.nrule_minimum && !cfg.override_nrule) {
      config_error("modes", "N = " + std::to_string(n) + " violates the N-rule N >= ceil(4 * " + num(coupling) +
                                " * " + num(tend) + ") + 128 = " + std::to_string(cfg.nrule_minimum) +
                                "; use modes >= " + std::to_string(rule_modes) + " or override_nrule = true");
    }
  } else {
    cfg.model.modes = std::max<Index>(rule_modes, harmonic ? 8 : 4);
    in.note_default("modes = " + std::to_string(cfg.model.modes) + " (N-rule)");
  }

  const std::string scheme = in.word("scheme", "oracle", {"oracle", "magnus-midpoint", "strang"});
  cfg.plan.scheme = scheme == "oracle" ? Scheme::oracle : scheme == "strang" ? Scheme::strang : Scheme::magnus_midpoint;
  cfg.plan.dt = in.real("dt", 2.0 * std::numbers::pi / 1000.0, 0.0, 1.0, true, false, "(0, 1]");
  cfg.plan.t_end = tend;
  const int samples = static_cast<int>(in.integer("samples", 64, 8, 100000, "[8, 100000]"));
  cfg.plan.sample_times = default_sample_times(tend, samples);
  cfg.plan.exponential.method =
      in.word("exp_method", "krylov", {"krylov", "dense"}) == "dense" ? ExpMethod::dense : ExpMethod::krylov;
  cfg.plan.exponential.krylov_dim = static_cast<int>(in.integer("krylov_dim", 30, 2, 500, "[2, 500]"));

  for (const std::string& item : in.list("orders", "1,2")) {
    double r = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), r);
    if (ec != std::errc() || ptr != item.data() + item.size() || !(r >= 0.0) || !std::isfinite(r) || r > 16.0) {
      config_error("orders", "'" + item + "' is not an order in [0, 16]");
    }
    cfg.orders.push_back(r);
  }
  cfg.plan.record_orders = cfg.orders;

  for (const std::string& item : in.list("suites", "growth")) {
    if (item == "growth") cfg.suites.insert(Suite::growth);
    else if (item == "oracle-vs-stepper") cfg.suites.insert(Suite::oracle_vs_stepper);
    else if (item == "commutator") cfg.suites.insert(Suite::commutator);
    else if (item == "chodosh") cfg.suites.insert(Suite::chodosh);
    else if (item == "egorov") cfg.suites.insert(Suite::egorov);
    else config_error("suites", "'" + item + "' not one of growth|oracle-vs-stepper|commutator|chodosh|egorov");
  }
  if (cfg.suites.empty()) config_error("suites", "at least one suite is required");
  if (cfg.suites.count(Suite::growth) && cfg.orders.empty()) config_error("orders", "growth suite needs orders");

  cfg.output_dir = in.get("out").value_or("out");
  if (!in.get("out")) in.note_default("out = out");
  cfg.seed = static_cast<std::uint64_t>(in.integer("seed", 0, 0, std::numeric_limits<long long>::max(), "[0, 2^63)"));

  const Index n_total = harmonic ? cfg.model.modes : 2 * cfg.model.modes + 1;
  cfg.initial_mode = static_cast<Index>(in.integer("initial_mode", 0, 0, n_total - 1,
                                                   "[0, " + std::to_string(n_total - 1) + "]"));

  const bool has_tmin = in.get("fit_tmin").has_value();
  const bool has_tmax = in.get("fit_tmax").has_value();
  if (has_tmin || has_tmax) {
    FitWindow w;
    w.t_min = in.real("fit_tmin", tend / 10.0, 0.0, tend, true, false, "(0, tend]");
    w.t_max = in.real("fit_tmax", tend, 0.0, tend, true, false, "(0, tend]");
    if (!(w.t_min < w.t_max)) config_error("fit_tmin", "must be smaller than fit_tmax");
    cfg.fit_window = w;
  } else {
    in.note_default("fit window = [tend/10, tend]");
  }

  // Plan checks that need the model (dt against sample gaps, N-rule).
  try {
    const SpectralModel built = build_model(cfg.model);
    validate_plan(cfg.plan, built, cfg.override_nrule);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    throw Error(ErrorCode::config, e.what());
  }

  cfg.applied_defaults = in.take_defaults();
  return cfg;
}

std::string format_growth_csv(const GrowthRecord& record) {
  const bool with_oracle = std::any_of(record.rows.begin(), record.rows.end(),
                                       [](const GrowthRow& r) { return r.oracle_error.has_value(); });
  std::string out = "t";
  for (double r : record.orders) out += ",norm_r" + num(r, 17);
  out += ",leakage";
  if (with_oracle) out += ",oracle_error";
  out += "\n";
  for (const GrowthRow& row : record.rows) {
    out += num(row.t, 17);
    for (double v : row.norms) out += "," + num(v, 17);
    out += "," + num(row.leakage, 17);
    if (with_oracle) out += "," + num(row.oracle_error.value_or(0.0), 17);
    out += "\n";
  }
  return out;
}

namespace {

struct SuiteOutcome {
  std::vector<std::string> lines;
  std::vector<std::string> failures;
  std::optional<double> max_leakage;
  std::optional<GrowthRecord> record;
};

SuiteOutcome run_growth(const ExperimentConfig& cfg, const SpectralModel& model) {
  SuiteOutcome out;
  const QuantumState psi0 = model.basis_state(cfg.initial_mode);
  PropagationPlan plan = cfg.plan;
  plan.abort_on_leakage = false;
  const Trajectory traj = propagate(model, psi0, plan);

  GrowthRecord record;
  record.model = model.name();
  record.scheme = to_string(plan.scheme);
  record.orders = cfg.orders;
  const AFlow flow(model);
  double max_leak = 0.0;
  for (const TrajectorySample& s : traj.samples) {
    GrowthRow row;
    row.t = s.t;
    for (double r : cfg.orders) row.norms.push_back(sobolev_norm(s.state, model, r));
    row.leakage = truncation_leakage(s.state, plan.tail_fraction);
    max_leak = std::max(max_leak, row.leakage);
    if (plan.scheme != Scheme::oracle) {
      const QuantumState exact =
          apply_free_flow(model, QuantumState(psi0.basis_id(), flow.apply(psi0.coeffs(), s.t)), s.t);
      row.oracle_error = (s.state.coeffs() - exact.coeffs()).norm() / exact.norm();
    }
    record.add(std::move(row));
  }
  out.max_leakage = max_leak;
  if (!(max_leak < plan.leakage_threshold)) {
    out.failures.push_back("growth: max leakage " + num(max_leak) + " exceeds " + num(plan.leakage_threshold));
  }

  const FitWindow window = cfg.fit_window.value_or(default_fit_window(record));
  for (double r : cfg.orders) {
    const FitReport fit = fit_growth_exponent(record, r, window);
    const bool near = std::abs(fit.slope - r) <= 0.15;
    out.lines.push_back("slope r=" + num(r) + ": " + num(fit.slope, 8) + " +/- " + num(fit.residual, 3) +
                        " over [" + num(window.t_min) + ", " + num(window.t_max) + "] (" +
                        std::to_string(fit.samples) + " samples), ceiling " + num(fit.ceiling) +
                        (near ? ", within r +/- 0.15" : ", outside r +/- 0.15"));
    if (fit.slope > fit.ceiling + 0.1) {
      out.failures.push_back("growth: slope " + num(fit.slope) + " for r = " + num(r) + " exceeds ceiling r + 0.1");
    }
  }

  if (model.ladder().exact_gaps()) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double t = dist(rng);
      const BandMatrix diff =
          conjugated_potential(model, t + 2.0 * std::numbers::pi).matrix() - conjugated_potential(model, t).matrix();
      worst = std::max(worst, diff.max_abs());
    }
    out.lines.push_back("periodicity: max |V_A(t + 2 pi) - V_A(t)| over 100 t = " + num(worst, 3));
    if (worst > 1e-12) out.failures.push_back("growth: V_A not 2 pi periodic (" + num(worst, 3) + ")");
  }
  out.record = std::move(record);
  return out;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
    sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
  }
  return sxy / sxx;
}

SuiteOutcome run_stepper(const ExperimentConfig& cfg, const SpectralModel& model) {
  SuiteOutcome out;
  const double period = 2.0 * std::numbers::pi;
  const QuantumState psi0 = model.basis_state(cfg.initial_mode);
  const QuantumState exact = oracle_propagate(model, psi0, period);
  const std::vector<double> dts{4.0 * cfg.plan.dt, 2.0 * cfg.plan.dt, cfg.plan.dt};

  for (Scheme scheme : {Scheme::magnus_midpoint, Scheme::strang}) {
    std::vector<double> errors;
    double drift = 0.0;
    for (double dt : dts) {
      PropagationPlan plan = cfg.plan;
      plan.scheme = scheme;
      plan.dt = dt;
      plan.t_end = period;
      plan.sample_times = {period};
      plan.abort_on_leakage = false;
      const Trajectory traj = propagate(model, psi0, plan);
      const QuantumState& final_state = traj.samples.back().state;
      errors.push_back((final_state.coeffs() - exact.coeffs()).norm() / exact.norm());
      drift = std::max(drift, std::abs(final_state.norm() - psi0.norm()));
    }
    const std::string name = to_string(scheme);
    const double order = log_slope(dts, errors);
    const bool roundoff = *std::max_element(errors.begin(), errors.end()) < 1e-11;
    out.lines.push_back(name + ": error at t = 2 pi for dt/" + num(cfg.plan.dt) + " x {4,2,1} = " + num(errors[0], 4) +
                        ", " + num(errors[1], 4) + ", " + num(errors[2], 4) + "; observed order " +
                        (roundoff ? std::string("not measurable (errors at roundoff)") : num(order, 4)) +
                        "; norm drift " + num(drift, 3));
    if (errors.back() > 1e-4) out.failures.push_back(name + ": error " + num(errors.back()) + " above 1e-4");
    if (drift > 1e-10) out.failures.push_back(name + ": norm drift " + num(drift) + " above 1e-10");
    if (!roundoff && std::abs(order - 2.0) > 0.2) {
      out.failures.push_back(name + ": observed order " + num(order) + " outside 2 +/- 0.2");
    }
  }
  return out;
}

SuiteOutcome run_commutator(const SpectralModel& model) {
  SuiteOutcome out;
  const bool surrogate = model.fourier().has_value();
  const NilpotencyReport nil = verify_nilpotency(model, 4, surrogate);
  out.lines.push_back(std::string("commutator reference: ") + (surrogate ? "signed index D" : "K0"));
  out.lines.push_back("nilpotency: " + nil.description);
  if (!nil.n_star) out.failures.push_back("commutator: no nilpotency index found");

  double worst = 0.0;
  int checked = 0;
  for (int r = 0; r <= 2; ++r) {
    for (int m = 0; m <= 4; ++m) {
      try {
        worst = std::max(worst, ad_power_routes(model, m, r).discrepancy);
        ++checked;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::window_exhausted) throw;
      }
    }
  }
  out.lines.push_back("ad power routes: max relative discrepancy " + num(worst, 3) + " over " +
                      std::to_string(checked) + " (M, r) pairs");
  if (worst > 1e-10) out.failures.push_back("commutator: multinomial and direct routes disagree (" + num(worst) + ")");

  try {
    const QuantumState psi0 = model.basis_state(model.size() / 2);
    const LiePolynomial poly = lie_polynomial(model, psi0, 1);
    const double c_star = growth_lower_constant(model, psi0, 1);
    out.lines.push_back("lower-bound constant c* (r = 1, psi0 = e_" + std::to_string(model.size() / 2) +
                        ") = " + num(c_star, 12) + " (Lie polynomial degree " + std::to_string(poly.degree()) + ")");
    if (c_star < 0.0) out.failures.push_back("commutator: c* negative");
  } catch (const Error& e) {
    out.lines.push_back(std::string("lower-bound constant c*: n/a (") + e.what() + ")");
  }
  return out;
}

SuiteOutcome run_chodosh(const SpectralModel& model) {
  SuiteOutcome out;
  if (model.kind() != ModelKind::harmonic) {
    out.lines.push_back("chodosh: skipped (Hermite-basis criterion applies to the harmonic model only)");
    return out;
  }
  const double delta = model.params().delta;
  const IndexedMatrix a = [delta](Index m, Index n) { return cplx{std::abs(m - n) == 1 ? delta : 0.0, 0.0}; };
  const IndexedMatrix k0 = [](Index m, Index n) { return cplx{m == n ? static_cast<double>(m) + 0.5 : 0.0, 0.0}; };
  const IndexedMatrix ones = [](Index, Index) { return cplx{1.0, 0.0}; };

  const SymbolMatrixReport ra = chodosh_order_check(a, 0.0);
  const SymbolMatrixReport rk = chodosh_order_check(k0, 1.0);
  const SymbolMatrixReport ro = chodosh_order_check(ones, 0.0);
  out.lines.push_back("chodosh A: " + ra.verdict());
  out.lines.push_back("chodosh K0: " + rk.verdict());
  out.lines.push_back("chodosh all-ones: " + ro.verdict());
  out.lines.push_back("chodosh settings: gamma <= 3, decay N <= 4, domain cap 1024 doubled, stability ratio < 1.5");
  if (!ra.consistent) out.failures.push_back("chodosh: A not consistent with order 0");
  if (!rk.consistent) out.failures.push_back("chodosh: K0 not consistent with order 1");
  if (ro.consistent) out.failures.push_back("chodosh: all-ones matrix unexpectedly consistent with order 0");
  return out;
}

SuiteOutcome run_egorov(std::uint64_t seed) {
  SuiteOutcome out;
  const Symbol a = [](double x, double xi) { return x / std::sqrt(1.0 + x * x + xi * xi); };
  std::vector<double> grid;
  for (int k = -16; k <= 16; ++k) grid.push_back(0.25 * k);
  auto max_diff = [](const SampledSymbol& p, const SampledSymbol& q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i)
      for (std::size_t k = 0; k < p.values[i].size(); ++k) worst = std::max(worst, std::abs(p.values[i][k] - q.values[i][k]));
    return worst;
  };
  const SampledSymbol base = egorov_rotated_symbol(a, grid, grid, 0.0);
  SampledSymbol direct = base;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t k = 0; k < grid.size(); ++k) direct.values[i][k] = a(grid[i], grid[k]);
  const double id0 = max_diff(base, direct);
  const double id2pi = max_diff(egorov_rotated_symbol(a, grid, grid, 2.0 * std::numbers::pi), direct);
  SampledSymbol quarter = direct;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t k = 0; k < grid.size(); ++k) quarter.values[i][k] = a(grid[k], -grid[i]);
  const double rot = max_diff(egorov_rotated_symbol(a, grid, grid, std::numbers::pi / 2), quarter);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  double group = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double s = dist(rng);
    const double t = dist(rng);
    // (a o phi^t) o phi^s evaluated in closed form
    const Symbol rotated = [&a, t](double x, double xi) {
      return a(x * std::cos(t) + xi * std::sin(t), -x * std::sin(t) + xi * std::cos(t));
    };
    group = std::max(group, max_diff(egorov_rotated_symbol(rotated, grid, grid, s),
                                     egorov_rotated_symbol(a, grid, grid, s + t)));
  }
  out.lines.push_back("egorov: |t=0 - a| = " + num(id0, 3) + ", |t=2pi - a| = " + num(id2pi, 3) +
                      ", |t=pi/2 - a(xi,-x)| = " + num(rot, 3) + ", group property max error " + num(group, 3));
  if (id0 != 0.0) out.failures.push_back("egorov: t = 0 is not the identity");
  if (id2pi > 1e-12) out.failures.push_back("egorov: t = 2 pi is not the identity");
  if (rot > 1e-12) out.failures.push_back("egorov: t = pi/2 does not give a(xi, -x)");
  if (group > 1e-12) out.failures.push_back("egorov: group property violated");
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult result;
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
  result.summary = cfg.output_dir / "summary.txt";

  std::vector<std::string> summary;
  const SpectralModel model = build_model(cfg.model);
  summary.push_back("model: " + model.name());
  summary.push_back("basis: " + model.basis_id() + " (N = " + std::to_string(model.size()) + ")");
  summary.push_back(std::string("strategy: ") + to_string(model.strategy()));
  switch (model.kind()) {
    case ModelKind::harmonic: summary.push_back("delta: " + num(cfg.model.delta, 17)); break;
    case ModelKind::halfwave:
      summary.push_back("epsilon: " + num(cfg.model.epsilon, 17) + " (v = 2 epsilon cos x)");
      summary.push_back("lambda: " + num(cfg.model.lambda, 17));
      break;
    case ModelKind::zoll_surrogate:
      summary.push_back("epsilon: " + num(cfg.model.epsilon, 17) + " (v = 2 epsilon cos x)");
      summary.push_back("mass: " + num(cfg.model.mass, 17));
      break;
    case ModelKind::custom: break;
  }
  summary.push_back("t_end: " + num(cfg.plan.t_end, 17));
  summary.push_back(std::string("scheme: ") + to_string(cfg.plan.scheme) + ", dt = " + num(cfg.plan.dt, 17) +
                    ", exponential = " + to_string(cfg.plan.exponential.method));
  std::string orders;
  for (double r : cfg.orders) orders += (orders.empty() ? "" : ", ") + num(r);
  summary.push_back("orders: " + orders);
  std::string suites;
  for (Suite s : cfg.suites) suites += (suites.empty() ? "" : ", ") + std::string(to_string(s));
  summary.push_back("suites: " + suites);
  summary.push_back("seed: " + std::to_string(cfg.seed));
  summary.push_back("initial mode: " + std::to_string(cfg.initial_mode));
  summary.push_back("N-rule: N >= ceil(4 * " + num(coupling_strength(model)) + " * " + num(cfg.plan.t_end) +
                    ") + 128 = " + std::to_string(cfg.nrule_minimum) + "; N = " + std::to_string(model.size()) +
                    (cfg.override_nrule ? " (override)" : ""));
  for (const std::string& d : cfg.applied_defaults) summary.push_back("default: " + d);

  std::vector<SuiteOutcome> outcomes;
  std::vector<std::string> errors;
  auto guarded = [&errors](const char* name, auto&& fn) -> SuiteOutcome {
    try {
      return fn();
    } catch (const std::exception& e) {
      SuiteOutcome failed;
      failed.lines.push_back(std::string(name) + ": error: " + e.what());
      errors.push_back(std::string(name) + ": " + e.what());
      return failed;
    }
  };

  // chodosh and egorov are independent of the propagation suites.
  std::future<SuiteOutcome> chodosh;
  std::future<SuiteOutcome> egorov;
  std::vector<std::string> async_errors;
  if (cfg.suites.count(Suite::chodosh)) {
    chodosh = std::async(std::launch::async, [&model, &async_errors] {
      try {
        return run_chodosh(model);
      } catch (const std::exception& e) {
        SuiteOutcome failed;
        failed.lines.push_back(std::string("chodosh: error: ") + e.what());
        failed.failures.push_back(std::string("!chodosh: ") + e.what());
        return failed;
      }
    });
  }
  if (cfg.suites.count(Suite::egorov)) {
    egorov = std::async(std::launch::async, [seed = cfg.seed] { return run_egorov(seed); });
  }

  if (cfg.suites.count(Suite::growth)) outcomes.push_back(guarded("growth", [&] { return run_growth(cfg, model); }));
  if (cfg.suites.count(Suite::oracle_vs_stepper))
    outcomes.push_back(guarded("oracle-vs-stepper", [&] { return run_stepper(cfg, model); }));
  if (cfg.suites.count(Suite::commutator)) outcomes.push_back(guarded("commutator", [&] { return run_commutator(model); }));
  if (chodosh.valid()) outcomes.push_back(chodosh.get());
  if (egorov.valid()) outcomes.push_back(egorov.get());

  std::optional<double> max_leakage;
  for (SuiteOutcome& o : outcomes) {
    for (auto& f : o.failures) {
      if (!f.empty() && f.front() == '!') {
        errors.push_back(f.substr(1));
      } else {
        result.failures.push_back(f);
      }
    }
    summary.insert(summary.end(), o.lines.begin(), o.lines.end());
    if (o.max_leakage) max_leakage = std::max(max_leakage.value_or(0.0), *o.max_leakage);
    if (o.record) {
      result.growth_csv = cfg.output_dir / "growth.csv";
      write_file(result.growth_csv, format_growth_csv(*o.record));
    }
  }
  summary.push_back("max leakage: " + (max_leakage ? num(*max_leakage, 6) : std::string("n/a (no propagation)")));
  for (const auto& f : result.failures) summary.push_back("FAILED: " + f);
  for (const auto& e : errors) summary.push_back("ERROR: " + e);

  result.exit_code = !errors.empty() ? 1 : (result.failures.empty() ? 0 : 2);
  summary.push_back(std::string("status: ") +
                    (result.exit_code == 0 ? "PASS" : result.exit_code == 2 ? "SUITE FAILURE" : "ERROR"));
  std::string text;
  for (const auto& line : summary) text += line + "\n";
  write_file(result.summary, text);
  result.failures.insert(result.failures.end(), errors.begin(), errors.end());
  return result;
}

}  // namespace normgrowth

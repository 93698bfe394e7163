#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "normgrowth/errors.hpp"
#include "normgrowth/experiment.hpp"

using namespace normgrowth;

int main(int argc, char** argv) {
  CLI::App app{"normgrowth: Sobolev norm growth experiments"};
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file");

  // Command-line values override the config file.
  RawConfig overrides;
  const std::vector<std::pair<const char*, const char*>> keys{
      {"model", "harmonic | halfwave | zoll"},
      {"modes", "N (harmonic) or J (torus models, N = 2J + 1)"},
      {"delta", "harmonic coupling in (0, 1]"},
      {"epsilon", "torus potential amplitude in (0, 1]"},
      {"mass", "Zoll mass in (0, 10]"},
      {"lambda", "half-wave shift in (0, 1)"},
      {"tend", "final time"},
      {"dt", "step size for the steppers"},
      {"scheme", "oracle | magnus-midpoint | strang"},
      {"orders", "comma-separated Sobolev orders"},
      {"suites", "comma-separated: growth, oracle-vs-stepper, commutator, chodosh, egorov"},
      {"out", "output directory"},
      {"seed", "random seed"},
      {"samples", "number of sample times"},
      {"initial_mode", "index of the initial basis state"},
      {"override_nrule", "allow N below the N-rule (true/false)"},
      {"fit_tmin", "fit window start"},
      {"fit_tmax", "fit window end"},
      {"exp_method", "krylov | dense"},
      {"krylov_dim", "Krylov subspace dimension"},
  };
  std::map<std::string, std::string> flag_values;
  for (const auto& [key, help] : keys) {
    std::string flag = std::string("--") + key;
    app.add_option(flag, flag_values[key], help);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    RawConfig raw;
    if (!config_path.empty()) raw = read_config_file(config_path);
    for (const auto& [key, help] : keys) {
      if (app.count(std::string("--") + key) > 0) raw[key] = flag_values[key];
    }
    const ExperimentConfig cfg = validate_config(raw);
    const RunResult result = run_experiment(cfg);
    std::printf("summary: %s\n", result.summary.string().c_str());
    if (!result.growth_csv.empty()) std::printf("growth: %s\n", result.growth_csv.string().c_str());
    for (const auto& f : result.failures) std::fprintf(stderr, "failed: %s\n", f.c_str());
    return result.exit_code;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

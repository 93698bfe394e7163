#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "normgrowth/diagnostics.hpp"
#include "normgrowth/models.hpp"
#include "normgrowth/propagators.hpp"

namespace normgrowth {

enum class Suite { growth, oracle_vs_stepper, commutator, chodosh, egorov };

const char* to_string(Suite suite);

/// Flat key -> value text, as read from a config file or command line.
using RawConfig = std::map<std::string, std::string>;

/// `key = value` lines; `#` starts a comment; blank lines ignored.
/// Malformed lines and repeated keys are config errors.
RawConfig parse_config_text(std::string_view text);
RawConfig read_config_file(const std::filesystem::path& path);

struct ExperimentConfig {
  ModelConfig model;
  PropagationPlan plan;
  std::vector<double> orders;
  std::set<Suite> suites;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  Index initial_mode = 0;
  bool override_nrule = false;
  std::optional<FitWindow> fit_window;

  /// ceil(4 * coupling * t_end) + 128 for this model and horizon.
  Index nrule_minimum = 0;
  /// "key = value" for every key filled from a default.
  std::vector<std::string> applied_defaults;
};

/// Applies defaults and range checks. Unknown keys, malformed values and
/// out-of-range values raise config errors naming the key; a truncation size
/// below the N-rule is rejected with the computed minimum unless
/// override_nrule = true.
ExperimentConfig validate_config(const RawConfig& raw);

struct RunResult {
  /// 0 success, 2 suite failure, 1 configuration or runtime error.
  int exit_code = 0;
  std::vector<std::string> failures;
  std::filesystem::path growth_csv;
  std::filesystem::path summary;
};

/// Runs every requested suite, writes growth.csv (growth suite) and
/// summary.txt into config.output_dir.
RunResult run_experiment(const ExperimentConfig& config);

/// growth.csv body: header `t,norm_r{r},...,leakage[,oracle_error]`, values
/// with 17 significant digits.
std::string format_growth_csv(const GrowthRecord& record);

}  // namespace normgrowth

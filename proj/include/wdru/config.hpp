#pragma once

#include "wdru/dual_solver.hpp"
#include "wdru/guarantees.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wdru {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind {
  kBoundVsNl,
  kConfVsNl,
  kRadiusSweep,
  kRobustnessSweep,
  kActive,
  kOracleCheck,
  kTrainDru,
  kTrainBaseline,
  kMinRadius,
  kWasserstein,
};

const char* to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTrainDru;
  /// CSV path, or "synthetic" for the built-in two-Gaussian generator.
  std::string dataset = "synthetic";
  std::string label_column = "label";
  std::string positive_token;
  bool standardize = true;
  std::size_t synthetic_rows = 500;
  std::size_t synthetic_dim = 10;
  double synthetic_separation = 4.0;
  std::uint64_t synthetic_seed = 0;

  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::size_t threads = 1;
  std::string output = "results.csv";

  std::size_t n_labeled = 20;
  /// When nonempty, bound/confidence experiments sweep these sizes.
  std::vector<std::size_t> n_labeled_grid;
  bool unlabeled_is_full = true;

  std::string prior = "strong";
  /// Strong prior probabilities (negative, positive); empty uses full-data frequencies.
  std::vector<double> prior_probabilities;
  double prior_level = 0.95;

  RadiusSelection radius{.eps = 0.1, .policy = RadiusPolicy::kFractionOfTrueDistance};
  double kappa = 1.0;
  double z_score = 0.0;
  bool force_zero_theta = false;
  SolverConfig solver;

  std::vector<double> eps_grid{1e-3, 1e-2, 1e-1, 1.0};
  std::vector<double> delta_grid{1e-3, 1e-2, 1e-1, 1.0};

  std::vector<std::string> strategies{"random"};
  std::size_t stop_at = 100;
  std::size_t candidate_subsample = 100;
  double ridge_gamma = 1e-3;
  bool mc_include_norm = false;
  SolverConfig dr_solver;

  std::size_t oracle_instances = 25;
  std::size_t oracle_dim = 3;
  std::size_t oracle_support = 5;
  std::size_t oracle_labeled = 3;
  double oracle_excess = 0.1;

  ExperimentConfig();
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys, malformed
/// values and duplicate keys throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Sets one key from its text form (same rules as the file parser).
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Every key with its current value in canonical text form, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);

void validate(const ExperimentConfig& config);

}  // namespace wdru

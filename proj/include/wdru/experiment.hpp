#pragma once

#include "wdru/config.hpp"
#include "wdru/data.hpp"
#include "wdru/label_prior.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wdru {

/// Small random instance for primal/dual agreement checks.
struct OracleInstance {
  LabeledDataset data;
  UnlabeledDataset support;
  LabelPrior prior;
  Theta theta;
  bool strong_prior = true;
};

/// Features uniform in [-1, 1]^q, q in [1, max_dim]; sizes uniform in
/// [1, max]; exact prior when strong_prior, otherwise a random interval.
OracleInstance random_oracle_instance(std::uint64_t seed, std::size_t max_dim, std::size_t max_support,
                                      std::size_t max_labeled, bool strong_prior);

/// Raw or synthetic table per config, standardized on the full table when
/// config.standardize is set.
RawTable load_dataset(const ExperimentConfig& config);

struct TrialOutcome {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  /// ok | infeasible | numerical | error
  std::string status = "ok";
  std::string message;
};

struct ExperimentReport {
  std::vector<TrialOutcome> trials;
  std::vector<std::string> outputs;
  std::string metadata_path;

  /// 0 when every trial succeeded, else 2 for the first infeasible trial,
  /// 3 for the first numerical failure, 1 for any other error.
  int exit_code() const;
};

/// Runs every trial (in a worker pool of config.threads), then writes the
/// result CSV, a summary CSV where the kind has one, and a JSON sidecar with
/// the full config and per-trial status. Trial failures are recorded and do
/// not stop the other trials. Output is independent of the thread count.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace wdru

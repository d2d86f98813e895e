#pragma once

#include "wdru/core_model.hpp"
#include "wdru/label_prior.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace wdru {

/// Dual variables of the worst-case problem. alpha prices the transport
/// budget, beta the labeled marginal, lambda_upper / lambda_lower the label
/// probability bounds.
struct DualState {
  Theta theta;
  double alpha = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd lambda_upper;
  Eigen::VectorXd lambda_lower;

  /// All dual variables zero.
  static DualState zeros(const Theta& theta, std::size_t num_labeled,
                         std::size_t num_labels = kNumLabels);
};

/// Throws std::invalid_argument when alpha or a lambda is negative or sizes
/// do not match the instance.
void validate(const DualState& state, std::size_t num_labeled);

enum class UpdateRule { kAdam, kSgd };

struct SolverConfig {
  double radius_eps = 0.0;
  double step_size = 0.05;
  std::size_t batch_size = 100;
  UpdateRule update_rule = UpdateRule::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double lr_decay_factor = 8.0;
  std::size_t lr_decay_every = 10000;
  std::size_t max_steps = 200000;
  /// No convergence stop before this many steps.
  std::size_t min_steps = 20000;
  std::uint64_t seed = 0;
  double convergence_tol = 1e-4;
  std::size_t convergence_window = 1000;
  /// Full-sample objective evaluation period (steps); drives the best-iterate
  /// record, the convergence windows, the trace and infeasibility detection.
  std::size_t eval_every = 100;
  bool update_theta = true;
  double objective_floor = -1e6;
  double alpha_cap = 1e6;
  /// When nonempty, the iteration trace is written here as CSV.
  std::string trace_path;
};

/// Throws std::invalid_argument on out-of-range fields.
void validate(const SolverConfig& config);

/// Active cell (labeled index i, label index k) of the inner maximum.
struct ArgmaxCell {
  std::size_t i = 0;
  std::size_t k = 0;
  friend bool operator==(const ArgmaxCell&, const ArgmaxCell&) = default;
};

struct PhiMax {
  double value = 0.0;
  ArgmaxCell argmax;
};

struct PhiSubgradient {
  Eigen::VectorXd theta;
  double alpha = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd lambda_upper;
  Eigen::VectorXd lambda_lower;
};

/// Per-label values of the function being maximized at one point.
using CellLosses = std::array<double, kNumLabels>;

/// loss(x, y^k) - (alpha c((x, y^k), z_i) + beta_i) - (lambda_upper_k - lambda_lower_k).
double phi_ik(const FeatureVector& x, ArgmaxCell cell, const DualState& state,
              const LabeledDataset& data, const TransportCostSpec& cost);

/// Max over all cells; ties go to the first cell in (i, k) lexicographic order.
PhiMax phi_max(const FeatureVector& x, const DualState& state, const LabeledDataset& data,
               const TransportCostSpec& cost);

/// Same maximum with caller-supplied per-label losses in place of the
/// logistic loss (used for the active-learning impact objective).
PhiMax phi_max(const CellLosses& losses, const FeatureVector& x, const DualState& state,
               const LabeledDataset& data, const TransportCostSpec& cost);

/// Subgradient of phi_max in every dual block, selected at the argmax cell.
PhiSubgradient phi_subgradients(const FeatureVector& x, const DualState& state,
                                const LabeledDataset& data, const TransportCostSpec& cost);

/// Linear part alpha eps + mean(beta) + sum_k (lambda_upper_k p_upper_k - lambda_lower_k p_lower_k).
double dual_linear_terms(const DualState& state, const LabelPrior& prior, double eps);

/// Phi at every unlabeled point.
std::vector<double> phi_values(const DualState& state, const LabeledDataset& data,
                               const UnlabeledDataset& unlabeled, const TransportCostSpec& cost);

/// Full-sample dual objective: linear terms plus the mean of Phi over `unlabeled`.
double dual_objective(const DualState& state, const LabeledDataset& data,
                      const UnlabeledDataset& unlabeled, const LabelPrior& prior, double eps,
                      const TransportCostSpec& cost);

/// Same objective with a fixed (unlabeled x labels) loss table.
double dual_objective(const Eigen::MatrixXd& loss_table, const DualState& state,
                      const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                      const LabelPrior& prior, double eps, const TransportCostSpec& cost);

enum class SolveStatus { kConverged, kMaxSteps, kInfeasible };

const char* to_string(SolveStatus status);

struct TraceRow {
  std::size_t step = 0;
  double lr = 0.0;
  double objective = 0.0;
  double alpha = 0.0;
  double theta_norm = 0.0;
  bool feasible = true;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kMaxSteps;
  /// Best full-sample iterate seen (every iterate is a valid upper bound).
  DualState state;
  double objective = 0.0;
  std::size_t steps = 0;
  std::vector<TraceRow> trace;
};

/// Minibatch projected stochastic subgradient descent on the dual, with
/// optional Adam scaling and step-wise learning-rate decay. theta is updated
/// jointly when config.update_theta is set, otherwise held at theta0.
/// An empty decision set is reported through SolveStatus::kInfeasible.
SolveResult sgd_solve(const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                      const LabelPrior& prior, const TransportCostSpec& cost,
                      const SolverConfig& config, const Theta& theta0);

/// Fixed-loss variant: the inner maximum uses `loss_table` (unlabeled x labels)
/// and only the dual variables move.
SolveResult sgd_solve(const Eigen::MatrixXd& loss_table, const LabeledDataset& data,
                      const UnlabeledDataset& unlabeled, const LabelPrior& prior,
                      const TransportCostSpec& cost, const SolverConfig& config);

/// Jointly minimizes the dual over theta and the dual variables and returns
/// theta. Throws InfeasibleError when the decision set is empty.
Theta train_dru(const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                const LabelPrior& prior, const TransportCostSpec& cost, const SolverConfig& config);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace wdru

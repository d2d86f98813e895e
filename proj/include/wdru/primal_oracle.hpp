#pragma once

#include "wdru/core_model.hpp"
#include "wdru/label_prior.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

// Exact finite-support solvers for the worst-case problem. These are the
// ground truth the stochastic dual solver is checked against.

namespace wdru {

struct SolverConfig;

struct DiscreteDistribution {
  std::vector<LabeledSample> atoms;
  std::vector<double> weights;

  static DiscreteDistribution empirical(const LabeledDataset& data);
};

/// Throws unless weights are nonnegative and sum to 1 within 1e-12.
void validate(const DiscreteDistribution& dist);

/// Transport plan between `sources` (rows) and `targets` (columns).
struct CouplingPlan {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd row_marginal;
  Eigen::VectorXd col_marginal;

  /// Largest deviation of the matrix row/column sums from the stored marginals.
  double marginal_error() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LpStatus status);

/// Worst-case plan over (support x labels) x labeled atoms. Row index of the
/// plan is `point * kNumLabels + label_index`, the column is the labeled atom.
struct WorstCaseLpResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  CouplingPlan plan;
};

struct WassersteinResult {
  double distance = 0.0;
  CouplingPlan plan;
};

/// Exact optimal transport between two discrete distributions, by successive
/// shortest augmenting paths on the bipartite transportation network.
WassersteinResult discrete_wasserstein(const DiscreteDistribution& mu,
                                       const DiscreteDistribution& nu,
                                       const TransportCostSpec& cost);

/// Sup over feasible plans of sum pi * loss(point, label), where `loss` is a
/// (support size) x kNumLabels table. The X-marginal is uniform over
/// `support`. The transport budget row carries an absolute slack of 1e-9.
WorstCaseLpResult solve_worst_case_lp(const Eigen::MatrixXd& loss,
                                      const std::vector<FeatureVector>& support,
                                      const LabeledDataset& data, const LabelPrior& prior,
                                      double eps, const TransportCostSpec& cost);

/// Logistic-loss instance of the table overload.
WorstCaseLpResult solve_worst_case_lp(const Theta& theta, const std::vector<FeatureVector>& support,
                                      const LabeledDataset& data, const LabelPrior& prior,
                                      double eps, const TransportCostSpec& cost);

/// Worst case over the plain Wasserstein ball restricted to a finite set of
/// candidate feature points (both labels allowed at every candidate), with no
/// marginal constraints. The compact-support counterpart of the baseline.
WorstCaseLpResult solve_ball_lp(const Theta& theta, const std::vector<FeatureVector>& candidates,
                                const LabeledDataset& data, double eps,
                                const TransportCostSpec& cost);

/// Smallest eps for which the decision set is nonempty, as the optimal value
/// of a min-cost LP over the marginal and label constraints.
/// Throws InfeasibleError when those constraints cannot be met at any radius.
double min_feasible_radius(const LabeledDataset& data, const std::vector<FeatureVector>& support,
                           const LabelPrior& prior, const TransportCostSpec& cost);

/// Cross-check route: bisection on eps of the worst-case LP's feasibility.
double min_feasible_radius_bisection(const LabeledDataset& data,
                                     const std::vector<FeatureVector>& support,
                                     const LabelPrior& prior, const TransportCostSpec& cost,
                                     double tol = 1e-9);

/// Same radius for binary labels through a one-dimensional Lagrangian dual
/// of the label-mass constraint, each evaluation an exact transport problem.
/// Scales to supports where the LP tableau would not fit.
double min_feasible_radius_flow(const LabeledDataset& data, const std::vector<FeatureVector>& support,
                                const LabelPrior& prior, const TransportCostSpec& cost);

/// Dense loss table (support x labels) for the logistic loss.
Eigen::MatrixXd logistic_loss_table(const Theta& theta, const std::vector<FeatureVector>& support);

struct DualityGap {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double eps0 = 0.0;
  /// False when eps sits at the minimal radius, where no dual minimizer is
  /// guaranteed to exist; the gap is reported but carries no pass/fail meaning.
  bool relint_ok = true;
};

/// Primal from the LP, dual from the stochastic solver with theta held fixed.
/// Throws InfeasibleError when eps is below the minimal feasible radius.
DualityGap duality_gap_check(const Theta& theta, const LabeledDataset& data,
                             const UnlabeledDataset& support, const LabelPrior& prior, double eps,
                             const TransportCostSpec& cost, const SolverConfig& config);

/// Debug dump of a plan as CSV (row, col, mass) for nonzero entries.
void write_plan_csv(const CouplingPlan& plan, const std::string& path);

}  // namespace wdru

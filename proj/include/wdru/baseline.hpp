#pragma once

#include "wdru/core_model.hpp"
#include "wdru/dual_solver.hpp"

#include <vector>

namespace wdru {

/// Robust solution over a plain Wasserstein ball around the labeled data.
struct BaselineResult {
  Theta theta;
  /// Minimizing transport price at theta.
  double alpha = 0.0;
  /// Worst-case expected loss of theta over the ball.
  double worst_case_value = 0.0;
};

struct BaselineInner {
  double value = 0.0;
  double alpha = 0.0;
};

/// min over alpha >= ||theta without bias|| of
///   alpha eps + mean_i max(loss(theta; x_i, y_i), loss(theta; x_i, -y_i) - alpha kappa).
/// The objective is convex piecewise linear in alpha, so the minimum is found
/// exactly among the lower limit and the breakpoints.
BaselineInner baseline_inner(const Theta& theta, const LabeledDataset& data, double eps,
                             const TransportCostSpec& cost);

double baseline_worst_case(const Theta& theta, const LabeledDataset& data, double eps,
                           const TransportCostSpec& cost);

/// Full-batch Adam on theta with the inner minimization solved exactly at
/// every step. Uses step size, Adam, decay, step limits and convergence
/// settings from `config`; radius_eps is ignored in favor of `eps`.
/// Throws NumericalError when ||theta|| exceeds 1e6.
BaselineResult baseline_train(const LabeledDataset& data, double eps, const TransportCostSpec& cost,
                              const SolverConfig& config);

struct RobustnessCell {
  double eps = 0.0;
  double delta = 0.0;
  /// exp(-worst case loss of theta_eps over the (eps + delta) ball).
  double likelihood = 0.0;
};

/// Trains one baseline per radius, then evaluates each against enlarged balls.
std::vector<RobustnessCell> robustness_sweep(const LabeledDataset& data,
                                             const std::vector<double>& eps_grid,
                                             const std::vector<double>& delta_grid,
                                             const TransportCostSpec& cost, const SolverConfig& config);

}  // namespace wdru

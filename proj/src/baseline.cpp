#include "wdru/baseline.hpp"

#include "wdru/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wdru {
namespace {

double lipschitz(const Theta& theta) { return theta.head(theta.size() - 1).norm(); }

void check_inputs(const Theta& theta, const LabeledDataset& data, double eps, const TransportCostSpec& cost) {
  validate(data);
  check_dims(theta.size(), static_cast<Eigen::Index>(data.dim()), "theta");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (!(cost.kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
}

}  // namespace

BaselineInner baseline_inner(const Theta& theta, const LabeledDataset& data, double eps,
                             const TransportCostSpec& cost) {
  check_inputs(theta, data, eps, cost);
  const std::size_t n = data.size();
  const double lo = lipschitz(theta);
  std::vector<double> a(n), b(n), breaks;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = data.samples[i];
    a[i] = logistic_loss(theta, s.x, s.y);
    b[i] = logistic_loss(theta, s.x, s.y.flipped());
    if (cost.kappa > 0.0) {
      const double t = (b[i] - a[i]) / cost.kappa;
      if (t > lo) breaks.push_back(t);
    }
  }
  std::sort(breaks.begin(), breaks.end());

  // Slope just right of alpha is eps - kappa / n * #{breaks > alpha}.
  double alpha = lo;
  const double nd = static_cast<double>(n);
  std::size_t above = breaks.size();
  if (cost.kappa > 0.0) {
    std::size_t j = 0;
    while (above > 0 && eps * nd < cost.kappa * static_cast<double>(above)) {
      alpha = breaks[j];
      while (j < breaks.size() && breaks[j] <= alpha) ++j;
      above = breaks.size() - j;
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::max(a[i], b[i] - alpha * cost.kappa);
  return {alpha * eps + sum / nd, alpha};
}

double baseline_worst_case(const Theta& theta, const LabeledDataset& data, double eps,
                           const TransportCostSpec& cost) {
  return baseline_inner(theta, data, eps, cost).value;
}

namespace {

// Objective and a subgradient in theta of the exact inner minimum.
double objective_and_grad(const Theta& theta, const LabeledDataset& data, double eps,
                          const TransportCostSpec& cost, Eigen::VectorXd* grad) {
  const BaselineInner inner = baseline_inner(theta, data, eps, cost);
  const std::size_t n = data.size();
  grad->setZero(theta.size());
  std::size_t flipped_right = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = data.samples[i];
    const double a = logistic_loss(theta, s.x, s.y);
    const double b = logistic_loss(theta, s.x, s.y.flipped());
    const bool flip = b - inner.alpha * cost.kappa > a;
    if (cost.kappa > 0.0 && (b - a) / cost.kappa > inner.alpha) ++flipped_right;
    *grad += loss_grad_theta(theta, s.x, flip ? s.y.flipped() : s.y);
  }
  *grad /= static_cast<double>(n);
  const Eigen::Index d = theta.size() - 1;
  const double lo = theta.head(d).norm();
  if (inner.alpha <= lo && lo > 0.0) {
    // Active lower limit: the constraint alpha >= ||theta_f|| moves with theta.
    const double right_slope = eps - cost.kappa * static_cast<double>(flipped_right) / static_cast<double>(n);
    if (right_slope > 0.0) grad->head(d) += right_slope * theta.head(d) / lo;
  }
  return inner.value;
}

}  // namespace

BaselineResult baseline_train(const LabeledDataset& data, double eps, const TransportCostSpec& cost,
                              const SolverConfig& config) {
  validate(config);
  validate(data);
  const auto dim = static_cast<Eigen::Index>(data.dim());
  Theta theta = Theta::Zero(dim);
  Eigen::VectorXd grad(dim), m1 = Eigen::VectorXd::Zero(dim), m2 = Eigen::VectorXd::Zero(dim);
  Theta best = theta;
  double best_obj = objective_and_grad(theta, data, eps, cost, &grad);
  double b1t = 1.0, b2t = 1.0;
  double window_sum = 0.0;
  std::size_t window_count = 0;
  bool have_prev = false;
  double prev_window = 0.0;

  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    const double obj = objective_and_grad(theta, data, eps, cost, &grad);
    if (!std::isfinite(obj)) throw NumericalError("baseline objective is not finite");
    if (obj < best_obj - 1e-12) {
      best_obj = obj;
      best = theta;
    }
    window_sum += obj;
    if (++window_count == config.convergence_window) {
      const double mean = window_sum / static_cast<double>(window_count);
      if (have_prev && step >= config.min_steps && std::abs(mean - prev_window) < config.convergence_tol) break;
      have_prev = true;
      prev_window = mean;
      window_sum = 0.0;
      window_count = 0;
    }
    const double lr = config.step_size /
                      std::pow(config.lr_decay_factor, static_cast<double>((step - 1) / config.lr_decay_every));
    if (config.update_rule == UpdateRule::kAdam) {
      b1t *= config.adam_beta1;
      b2t *= config.adam_beta2;
      m1 = config.adam_beta1 * m1 + (1.0 - config.adam_beta1) * grad;
      m2 = config.adam_beta2 * m2 + (1.0 - config.adam_beta2) * grad.cwiseAbs2();
      theta.array() -= lr * (m1 / (1.0 - b1t)).array() / ((m2 / (1.0 - b2t)).array().sqrt() + config.adam_epsilon);
    } else {
      theta -= lr * grad;
    }
    if (!(theta.norm() <= 1e6)) throw NumericalError("baseline weights diverged");
  }
  const double last = baseline_worst_case(theta, data, eps, cost);
  if (last < best_obj - 1e-12) best = theta;

  BaselineResult out;
  out.theta = best;
  const BaselineInner inner = baseline_inner(best, data, eps, cost);
  out.alpha = inner.alpha;
  out.worst_case_value = inner.value;
  return out;
}

std::vector<RobustnessCell> robustness_sweep(const LabeledDataset& data,
                                             const std::vector<double>& eps_grid,
                                             const std::vector<double>& delta_grid,
                                             const TransportCostSpec& cost, const SolverConfig& config) {
  std::vector<RobustnessCell> out;
  for (double eps : eps_grid) {
    const Theta theta = baseline_train(data, eps, cost, config).theta;
    for (double delta : delta_grid) {
      if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
      out.push_back({eps, delta, std::exp(-baseline_worst_case(theta, data, eps + delta, cost))});
    }
  }
  return out;
}

}  // namespace wdru

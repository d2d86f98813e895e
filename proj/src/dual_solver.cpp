#include "wdru/dual_solver.hpp"

#include "wdru/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>

namespace wdru {

DualState DualState::zeros(const Theta& theta, std::size_t num_labeled, std::size_t num_labels) {
  DualState s;
  s.theta = theta;
  s.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_labeled));
  s.lambda_upper = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_labels));
  s.lambda_lower = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_labels));
  return s;
}

void validate(const DualState& state, std::size_t num_labeled) {
  if (static_cast<std::size_t>(state.beta.size()) != num_labeled) {
    throw std::invalid_argument("beta must have one entry per labeled sample");
  }
  if (state.lambda_upper.size() != static_cast<Eigen::Index>(kNumLabels) ||
      state.lambda_lower.size() != static_cast<Eigen::Index>(kNumLabels)) {
    throw std::invalid_argument("lambda vectors must have one entry per label");
  }
  if (!(state.alpha >= 0.0) || (state.lambda_upper.array() < 0.0).any() ||
      (state.lambda_lower.array() < 0.0).any()) {
    throw std::invalid_argument("alpha and lambda must be nonnegative");
  }
}

void validate(const SolverConfig& c) {
  if (!(c.radius_eps >= 0.0)) throw std::invalid_argument("radius_eps must be >= 0");
  if (!(c.step_size > 0.0)) throw std::invalid_argument("step_size must be > 0");
  if (c.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(c.adam_beta1 > 0.0 && c.adam_beta1 < 1.0 && c.adam_beta2 > 0.0 && c.adam_beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must lie in (0, 1)");
  }
  if (!(c.lr_decay_factor >= 1.0)) throw std::invalid_argument("lr_decay_factor must be >= 1");
  if (c.lr_decay_every < 1 || c.max_steps < 1 || c.eval_every < 1 || c.convergence_window < 1) {
    throw std::invalid_argument("step counts must be positive");
  }
  if (!(c.convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be > 0");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxSteps: return "max-steps";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

double label_cost(std::size_t k, Label yi, const TransportCostSpec& cost) {
  return Label::from_index(k) == yi ? 0.0 : cost.kappa;
}

// Inner maximum given per-label losses and the distances ||x - x_i||.
template <typename DistFn>
PhiMax inner_max(const CellLosses& losses, DistFn dist, const DualState& s,
                 const LabeledDataset& data, const TransportCostSpec& cost) {
  PhiMax best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = dist(i);
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      const double c = d + label_cost(k, data.samples[i].y, cost);
      const double v = losses[k] - (s.alpha * c + s.beta(static_cast<Eigen::Index>(i))) -
                       (s.lambda_upper(static_cast<Eigen::Index>(k)) -
                        s.lambda_lower(static_cast<Eigen::Index>(k)));
      if (v > best.value) best = {v, {i, k}};
    }
  }
  return best;
}

CellLosses logistic_losses(const Theta& theta, const FeatureVector& x) {
  const double t = theta.dot(x);
  return {softplus(t), softplus(-t)};  // k = 0 (y = 0), k = 1 (y = 1)
}

// Parameters packed as [theta | alpha | beta | lambda_upper | lambda_lower].
struct Layout {
  Eigen::Index d, nl, ny;
  Eigen::Index alpha() const { return d; }
  Eigen::Index beta() const { return d + 1; }
  Eigen::Index upper() const { return d + 1 + nl; }
  Eigen::Index lower() const { return d + 1 + nl + ny; }
  Eigen::Index size() const { return d + 1 + nl + 2 * ny; }

  Eigen::VectorXd pack(const DualState& s) const {
    Eigen::VectorXd p(size());
    p.head(d) = s.theta;
    p(alpha()) = s.alpha;
    p.segment(beta(), nl) = s.beta;
    p.segment(upper(), ny) = s.lambda_upper;
    p.segment(lower(), ny) = s.lambda_lower;
    return p;
  }
  void unpack(const Eigen::VectorXd& p, DualState* s) const {
    s->theta = p.head(d);
    s->alpha = p(alpha());
    s->beta = p.segment(beta(), nl);
    s->lambda_upper = p.segment(upper(), ny);
    s->lambda_lower = p.segment(lower(), ny);
  }
};

class DualSgd {
 public:
  DualSgd(const LabeledDataset& data, const UnlabeledDataset& unlabeled, const LabelPrior& prior,
          const TransportCostSpec& cost, const SolverConfig& config,
          const Eigen::MatrixXd* loss_table)
      : data_(data), unlabeled_(unlabeled), prior_(prior), cost_(cost), cfg_(config),
        table_(loss_table) {
    const auto nu = static_cast<Eigen::Index>(unlabeled.size());
    const auto nl = static_cast<Eigen::Index>(data.size());
    dist_.resize(nu, nl);
    for (Eigen::Index j = 0; j < nu; ++j)
      for (Eigen::Index i = 0; i < nl; ++i)
        dist_(j, i) = (unlabeled.points[static_cast<std::size_t>(j)] -
                       data.samples[static_cast<std::size_t>(i)].x).norm();
  }

  SolveResult run(const Theta& theta0) {
    const bool move_theta = cfg_.update_theta && table_ == nullptr;
    const Layout lay{theta0.size(), static_cast<Eigen::Index>(data_.size()),
                     static_cast<Eigen::Index>(kNumLabels)};
    DualState state = DualState::zeros(theta0, data_.size());
    Eigen::VectorXd params = lay.pack(state);
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(lay.size());
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(lay.size());
    Eigen::VectorXd grad(lay.size());
    CounterRng rng(cfg_.seed);

    SolveResult out;
    out.state = state;
    out.objective = full_objective(state);
    double window_sum = 0.0;
    std::size_t window_count = 0;
    std::optional<double> prev_window;
    const std::size_t evals_per_window = std::max<std::size_t>(1, cfg_.convergence_window / cfg_.eval_every);
    double b1t = 1.0, b2t = 1.0;
    const double inv_nb = 1.0 / static_cast<double>(cfg_.batch_size);

    for (std::size_t step = 1; step <= cfg_.max_steps; ++step) {
      const double lr = cfg_.step_size /
                        std::pow(cfg_.lr_decay_factor, static_cast<double>((step - 1) / cfg_.lr_decay_every));
      grad.setZero();
      double batch_phi = 0.0;
      for (std::size_t b = 0; b < cfg_.batch_size; ++b) {
        const std::size_t j = rng.index(unlabeled_.size());
        const FeatureVector& x = unlabeled_.points[j];
        const CellLosses losses = losses_at(j, state.theta);
        const PhiMax pm = inner_max(
            losses, [&](std::size_t i) { return dist_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)); },
            state, data_, cost_);
        batch_phi += pm.value;
        const auto [i, k] = pm.argmax;
        grad(lay.alpha()) -= dist_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) +
                             label_cost(k, data_.samples[i].y, cost_);
        grad(lay.beta() + static_cast<Eigen::Index>(i)) -= 1.0;
        grad(lay.upper() + static_cast<Eigen::Index>(k)) -= 1.0;
        grad(lay.lower() + static_cast<Eigen::Index>(k)) += 1.0;
        if (move_theta) grad.head(lay.d) += (sigmoid(state.theta.dot(x)) - static_cast<double>(k)) * x;
      }
      grad *= inv_nb;
      grad(lay.alpha()) += cfg_.radius_eps;
      grad.segment(lay.beta(), lay.nl).array() += 1.0 / static_cast<double>(data_.size());
      for (Eigen::Index k = 0; k < lay.ny; ++k) {
        grad(lay.upper() + k) += prior_.upper[static_cast<std::size_t>(k)];
        grad(lay.lower() + k) -= prior_.lower[static_cast<std::size_t>(k)];
      }
      if (!move_theta) grad.head(lay.d).setZero();

      if (cfg_.update_rule == UpdateRule::kAdam) {
        b1t *= cfg_.adam_beta1;
        b2t *= cfg_.adam_beta2;
        m1 = cfg_.adam_beta1 * m1 + (1.0 - cfg_.adam_beta1) * grad;
        m2 = cfg_.adam_beta2 * m2 + (1.0 - cfg_.adam_beta2) * grad.cwiseAbs2();
        const Eigen::VectorXd mhat = m1 / (1.0 - b1t);
        const Eigen::VectorXd vhat = m2 / (1.0 - b2t);
        params.array() -= lr * mhat.array() / (vhat.array().sqrt() + cfg_.adam_epsilon);
      } else {
        params -= lr * grad;
      }
      if (!move_theta) params.head(lay.d) = theta0;
      params(lay.alpha()) = std::max(0.0, params(lay.alpha()));
      params.segment(lay.upper(), 2 * lay.ny) = params.segment(lay.upper(), 2 * lay.ny).cwiseMax(0.0);
      lay.unpack(params, &state);
      out.steps = step;

      if (step % cfg_.eval_every != 0 && step != cfg_.max_steps) continue;

      const double obj = full_objective(state);
      const bool infeasible = obj < lower_bound(state.theta) - 1e-9 || obj < cfg_.objective_floor ||
                              state.alpha > cfg_.alpha_cap || !std::isfinite(obj);
      out.trace.push_back({step, lr, dual_linear_terms(state, prior_, cfg_.radius_eps) + batch_phi * inv_nb,
                           state.alpha, state.theta.norm(), !infeasible});
      if (infeasible) {
        out.status = SolveStatus::kInfeasible;
        out.state = state;
        out.objective = obj;
        return finish(std::move(out));
      }
      if (obj < out.objective - 1e-12) {
        out.objective = obj;
        out.state = state;
      }
      window_sum += obj;
      if (++window_count == evals_per_window) {
        const double mean = window_sum / static_cast<double>(window_count);
        if (prev_window && step >= cfg_.min_steps && std::abs(mean - *prev_window) < cfg_.convergence_tol) {
          out.status = SolveStatus::kConverged;
          return finish(std::move(out));
        }
        prev_window = mean;
        window_sum = 0.0;
        window_count = 0;
      }
    }
    out.status = SolveStatus::kMaxSteps;
    return finish(std::move(out));
  }

 private:
  CellLosses losses_at(std::size_t j, const Theta& theta) const {
    if (table_ != nullptr) {
      const auto r = static_cast<Eigen::Index>(j);
      return {(*table_)(r, 0), (*table_)(r, 1)};
    }
    return logistic_losses(theta, unlabeled_.points[j]);
  }

  double full_objective(const DualState& s) const {
    double total = 0.0;
    for (std::size_t j = 0; j < unlabeled_.size(); ++j) {
      total += inner_max(
                   losses_at(j, s.theta),
                   [&](std::size_t i) { return dist_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)); },
                   s, data_, cost_)
                   .value;
    }
    return dual_linear_terms(s, prior_, cfg_.radius_eps) + total / static_cast<double>(unlabeled_.size());
  }

  // Any feasible distribution has expected loss at least the smallest cell
  // loss, so a dual value below it certifies an empty decision set.
  double lower_bound(const Theta& theta) const {
    double lb = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < unlabeled_.size(); ++j)
      for (double l : losses_at(j, theta)) lb = std::min(lb, l);
    return lb;
  }

  SolveResult finish(SolveResult out) const {
    if (!cfg_.trace_path.empty()) write_trace_csv(out.trace, cfg_.trace_path);
    return out;
  }

  const LabeledDataset& data_;
  const UnlabeledDataset& unlabeled_;
  const LabelPrior& prior_;
  const TransportCostSpec& cost_;
  const SolverConfig& cfg_;
  const Eigen::MatrixXd* table_;
  Eigen::MatrixXd dist_;
};

void check_problem(const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                   const LabelPrior& prior, const SolverConfig& config, Eigen::Index theta_dim) {
  validate(data);
  validate(unlabeled);
  validate(prior);
  validate(config);
  if (prior.num_labels() != kNumLabels) throw std::invalid_argument("prior must be binary");
  check_dims(static_cast<Eigen::Index>(unlabeled.dim()), static_cast<Eigen::Index>(data.dim()),
             "unlabeled vs labeled");
  check_dims(theta_dim, static_cast<Eigen::Index>(data.dim()), "theta");
}

}  // namespace

double phi_ik(const FeatureVector& x, ArgmaxCell cell, const DualState& state,
              const LabeledDataset& data, const TransportCostSpec& cost) {
  if (cell.i >= data.size() || cell.k >= kNumLabels) throw std::out_of_range("cell index out of range");
  const Label yk = Label::from_index(cell.k);
  const auto& z = data.samples[cell.i];
  return logistic_loss(state.theta, x, yk) -
         (state.alpha * transport_cost(x, yk, z.x, z.y, cost) +
          state.beta(static_cast<Eigen::Index>(cell.i))) -
         (state.lambda_upper(static_cast<Eigen::Index>(cell.k)) -
          state.lambda_lower(static_cast<Eigen::Index>(cell.k)));
}

PhiMax phi_max(const CellLosses& losses, const FeatureVector& x, const DualState& state,
               const LabeledDataset& data, const TransportCostSpec& cost) {
  validate(data);
  check_dims(x.size(), static_cast<Eigen::Index>(data.dim()), "phi_max");
  return inner_max(
      losses, [&](std::size_t i) { return (x - data.samples[i].x).norm(); }, state, data, cost);
}

PhiMax phi_max(const FeatureVector& x, const DualState& state, const LabeledDataset& data,
               const TransportCostSpec& cost) {
  check_dims(state.theta.size(), x.size(), "phi_max");
  return phi_max(logistic_losses(state.theta, x), x, state, data, cost);
}

PhiSubgradient phi_subgradients(const FeatureVector& x, const DualState& state,
                                const LabeledDataset& data, const TransportCostSpec& cost) {
  const PhiMax pm = phi_max(x, state, data, cost);
  const auto [i, k] = pm.argmax;
  const Label yk = Label::from_index(k);
  PhiSubgradient g;
  g.theta = loss_grad_theta(state.theta, x, yk);
  g.alpha = -transport_cost(x, yk, data.samples[i].x, data.samples[i].y, cost);
  g.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.size()));
  g.beta(static_cast<Eigen::Index>(i)) = -1.0;
  g.lambda_upper = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kNumLabels));
  g.lambda_upper(static_cast<Eigen::Index>(k)) = -1.0;
  g.lambda_lower = -g.lambda_upper;
  return g;
}

double dual_linear_terms(const DualState& state, const LabelPrior& prior, double eps) {
  double v = state.alpha * eps + state.beta.mean();
  for (std::size_t k = 0; k < prior.num_labels(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    v += state.lambda_upper(kk) * prior.upper[k] - state.lambda_lower(kk) * prior.lower[k];
  }
  return v;
}

std::vector<double> phi_values(const DualState& state, const LabeledDataset& data,
                               const UnlabeledDataset& unlabeled, const TransportCostSpec& cost) {
  validate(unlabeled);
  std::vector<double> out;
  out.reserve(unlabeled.size());
  for (const auto& x : unlabeled.points) out.push_back(phi_max(x, state, data, cost).value);
  return out;
}

double dual_objective(const DualState& state, const LabeledDataset& data,
                      const UnlabeledDataset& unlabeled, const LabelPrior& prior, double eps,
                      const TransportCostSpec& cost) {
  validate(state, data.size());
  const auto phis = phi_values(state, data, unlabeled, cost);
  double total = 0.0;
  for (double v : phis) total += v;
  return dual_linear_terms(state, prior, eps) + total / static_cast<double>(phis.size());
}

double dual_objective(const Eigen::MatrixXd& loss_table, const DualState& state,
                      const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                      const LabelPrior& prior, double eps, const TransportCostSpec& cost) {
  validate(state, data.size());
  validate(unlabeled);
  if (loss_table.rows() != static_cast<Eigen::Index>(unlabeled.size()) ||
      loss_table.cols() != static_cast<Eigen::Index>(kNumLabels)) {
    throw DimensionError("loss table must be unlabeled x labels");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < unlabeled.size(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    total += phi_max({loss_table(r, 0), loss_table(r, 1)}, unlabeled.points[j], state, data, cost).value;
  }
  return dual_linear_terms(state, prior, eps) + total / static_cast<double>(unlabeled.size());
}

SolveResult sgd_solve(const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                      const LabelPrior& prior, const TransportCostSpec& cost,
                      const SolverConfig& config, const Theta& theta0) {
  check_problem(data, unlabeled, prior, config, theta0.size());
  DualSgd solver(data, unlabeled, prior, cost, config, nullptr);
  return solver.run(theta0);
}

SolveResult sgd_solve(const Eigen::MatrixXd& loss_table, const LabeledDataset& data,
                      const UnlabeledDataset& unlabeled, const LabelPrior& prior,
                      const TransportCostSpec& cost, const SolverConfig& config) {
  check_problem(data, unlabeled, prior, config, static_cast<Eigen::Index>(data.dim()));
  if (loss_table.rows() != static_cast<Eigen::Index>(unlabeled.size()) ||
      loss_table.cols() != static_cast<Eigen::Index>(kNumLabels)) {
    throw DimensionError("loss table must be unlabeled x labels");
  }
  DualSgd solver(data, unlabeled, prior, cost, config, &loss_table);
  return solver.run(Theta::Zero(static_cast<Eigen::Index>(data.dim())));
}

Theta train_dru(const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                const LabelPrior& prior, const TransportCostSpec& cost, const SolverConfig& config) {
  SolverConfig joint = config;
  joint.update_theta = true;
  const SolveResult r = sgd_solve(data, unlabeled, prior, cost, joint,
                                  Theta::Zero(static_cast<Eigen::Index>(data.dim())));
  if (r.status == SolveStatus::kInfeasible) {
    throw InfeasibleError("decision set is empty at radius " + std::to_string(config.radius_eps));
  }
  return r.state.theta;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  out.precision(17);
  out << "step,lr,objective_estimate,alpha,theta_norm,feasible\n";
  for (const auto& r : trace) {
    out << r.step << ',' << r.lr << ',' << r.objective << ',' << r.alpha << ',' << r.theta_norm << ','
        << (r.feasible ? 1 : 0) << '\n';
  }
}

}  // namespace wdru

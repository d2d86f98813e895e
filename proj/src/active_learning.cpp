#include "wdru/active_learning.hpp"

#include "wdru/errors.hpp"
#include "wdru/guarantees.hpp"
#include "wdru/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wdru {
namespace {

double ridge_objective(const Theta& theta, const LabeledDataset& data, double gamma) {
  double sum = 0.0;
  for (const auto& s : data.samples) sum += logistic_loss(theta, s.x, s.y);
  return sum / static_cast<double>(data.size()) + gamma * theta.squaredNorm();
}

template <typename Score>
std::size_t first_argmax(std::size_t n, Score score) {
  std::size_t best = 0;
  double best_value = score(0);
  for (std::size_t j = 1; j < n; ++j) {
    const double v = score(j);
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  return best;
}

}  // namespace

Theta erm_train_l2(const LabeledDataset& data, double ridge_gamma) {
  validate(data);
  if (!(ridge_gamma >= 0.0)) throw std::invalid_argument("ridge_gamma must be >= 0");
  const auto d = static_cast<Eigen::Index>(data.dim());
  const double inv_n = 1.0 / static_cast<double>(data.size());
  Theta theta = Theta::Zero(d);
  double obj = ridge_objective(theta, data, ridge_gamma);
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd grad = 2.0 * ridge_gamma * theta;
    Eigen::MatrixXd hess = 2.0 * ridge_gamma * Eigen::MatrixXd::Identity(d, d);
    for (const auto& s : data.samples) {
      const double p = sigmoid(theta.dot(s.x));
      grad += inv_n * (p - s.y.loss_view()) * s.x;
      hess.noalias() += inv_n * p * (1.0 - p) * s.x * s.x.transpose();
    }
    if (grad.norm() <= 1e-6) return theta;
    Eigen::VectorXd dir = hess.ldlt().solve(-grad);
    if (!dir.allFinite() || dir.dot(grad) >= 0.0) dir = -grad;
    double t = 1.0;
    double next = ridge_objective(theta + dir, data, ridge_gamma);
    while (next > obj + 1e-4 * t * grad.dot(dir) && t > 1e-12) {
      t *= 0.5;
      next = ridge_objective(theta + t * dir, data, ridge_gamma);
    }
    theta += t * dir;
    obj = next;
  }
  throw NumericalError("ridge logistic regression did not converge");
}

double impact_gradient_norm(const Theta& theta, const FeatureVector& x, Label y) {
  check_dims(theta.size(), x.size(), "theta vs x");
  return x.norm() * std::abs(sigmoid(theta.dot(x)) - y.loss_view());
}

double score_emc(const Theta& theta, const FeatureVector& x) {
  check_dims(theta.size(), x.size(), "theta vs x");
  const double t = theta.dot(x);
  return 2.0 * x.norm() / ((1.0 + std::exp(-t)) * (1.0 + std::exp(t)));
}

double score_min_mc(const Theta& theta, const FeatureVector& x, bool include_norm) {
  check_dims(theta.size(), x.size(), "theta vs x");
  const double p = sigmoid(theta.dot(x));
  return std::min(p, 1.0 - p) * (include_norm ? x.norm() : 1.0);
}

double score_max_mc(const Theta& theta, const FeatureVector& x, bool include_norm) {
  check_dims(theta.size(), x.size(), "theta vs x");
  const double p = sigmoid(theta.dot(x));
  return std::max(p, 1.0 - p) * (include_norm ? x.norm() : 1.0);
}

double score_dr(const FeatureVector& x_star, const LabeledDataset& data,
                const UnlabeledDataset& unlabeled, const LabelPrior& prior, double eps,
                const TransportCostSpec& cost, const Theta& theta, const SolverConfig& config) {
  validate(unlabeled);
  const Eigen::Index nu = static_cast<Eigen::Index>(unlabeled.size());
  std::size_t copies = 0;
  for (const auto& x : unlabeled.points) copies += x == x_star;
  if (copies == 0) throw std::invalid_argument("x_star is not an unlabeled point");

  // Impact at x_star over its empirical mass; the dual is positively
  // homogeneous in the table, so solve on a unit-scaled copy.
  const double weight = static_cast<double>(nu) / static_cast<double>(copies);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(nu, kNumLabels);
  double scale = 0.0;
  for (Eigen::Index j = 0; j < nu; ++j) {
    if (unlabeled.points[static_cast<std::size_t>(j)] != x_star) continue;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      table(j, static_cast<Eigen::Index>(k)) = -impact_gradient_norm(theta, x_star, Label::from_index(k));
      scale = std::max(scale, -table(j, static_cast<Eigen::Index>(k)));
    }
  }
  if (scale == 0.0) scale = 1.0;
  table /= scale;

  SolverConfig cfg = config;
  cfg.radius_eps = eps;
  const SolveResult res = sgd_solve(table, data, unlabeled, prior, cost, cfg);
  if (res.status == SolveStatus::kInfeasible) throw InfeasibleError("robust impact: empty decision set");
  return -res.objective * scale * weight;
}

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kRandom: return "random";
    case StrategyKind::kEmc: return "emc";
    case StrategyKind::kMinMc: return "min_mc";
    case StrategyKind::kMaxMc: return "max_mc";
    case StrategyKind::kDrStrong: return "dr_strong";
    case StrategyKind::kDrWeak: return "dr_weak";
  }
  return "unknown";
}

StrategyKind parse_strategy(const std::string& name) {
  for (auto k : {StrategyKind::kRandom, StrategyKind::kEmc, StrategyKind::kMinMc, StrategyKind::kMaxMc,
                 StrategyKind::kDrStrong, StrategyKind::kDrWeak}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown strategy: " + name);
}

SolverConfig StrategyConfig::default_dr_solver() {
  SolverConfig c;
  c.lr_decay_factor = 10.0;
  c.lr_decay_every = 5000;
  c.max_steps = 20000;
  c.min_steps = 5000;
  return c;
}

void validate(const StrategyConfig& config) {
  if (config.candidate_subsample < 1) throw std::invalid_argument("candidate_subsample must be >= 1");
  if (!(config.ridge_gamma >= 0.0)) throw std::invalid_argument("ridge_gamma must be >= 0");
  if (!(config.delta_margin > 0.0)) throw std::invalid_argument("delta_margin must be > 0");
  if (config.kind == StrategyKind::kDrStrong && config.true_probabilities.size() != kNumLabels) {
    throw std::invalid_argument("dr_strong needs the true label probabilities");
  }
  validate(config.solver);
}

std::size_t select_next(const ActiveState& state, const StrategyConfig& strategy) {
  const std::size_t n = state.pool.size();
  if (n == 0) throw std::invalid_argument("empty pool");
  CounterRng rng(derive_seed(strategy.seed, state.step));
  switch (strategy.kind) {
    case StrategyKind::kRandom:
      return rng.index(n);
    case StrategyKind::kEmc:
      return first_argmax(n, [&](std::size_t j) { return score_emc(state.theta, state.pool[j]); });
    case StrategyKind::kMinMc:
      return first_argmax(n, [&](std::size_t j) {
        return score_min_mc(state.theta, state.pool[j], strategy.mc_include_norm);
      });
    case StrategyKind::kMaxMc:
      return first_argmax(n, [&](std::size_t j) {
        return score_max_mc(state.theta, state.pool[j], strategy.mc_include_norm);
      });
    case StrategyKind::kDrStrong:
    case StrategyKind::kDrWeak: break;
  }
  if (n == 1) return 0;

  const LabelPrior prior = strategy.kind == StrategyKind::kDrStrong
                               ? LabelPrior::exact(strategy.true_probabilities)
                               : state.weak_prior;
  const UnlabeledDataset unlabeled{state.pool};
  const double eps = prior_min_radius(state.labeled, unlabeled, prior, strategy.cost) + strategy.delta_margin;
  std::vector<std::size_t> cand =
      sample_without_replacement(n, std::min(strategy.candidate_subsample, n), rng);
  std::sort(cand.begin(), cand.end());
  SolverConfig cfg = strategy.solver;
  cfg.seed = derive_seed(rng.next(), 0);
  return cand[first_argmax(cand.size(), [&](std::size_t c) {
    return score_dr(state.pool[cand[c]], state.labeled, unlabeled, prior, eps, strategy.cost, state.theta, cfg);
  })];
}

std::vector<CurvePoint> run_active_loop(ActiveState state, const StrategyConfig& strategy,
                                        const LabeledDataset& eval, std::size_t stop_at) {
  validate(strategy);
  validate(state.labeled);
  if (state.pool.size() != state.pool_labels.size()) throw std::invalid_argument("pool labels misaligned");
  if (stop_at <= state.labeled.size()) throw std::invalid_argument("stop_at must exceed the initial labeled size");
  if (strategy.kind == StrategyKind::kDrWeak && state.weak_prior.lower.empty()) {
    state.weak_prior = make_prior(state.labeled, PriorSpec::weak(strategy.weak_level));
  }
  std::vector<CurvePoint> curve;
  while (true) {
    state.theta = erm_train_l2(state.labeled, strategy.ridge_gamma);
    curve.push_back({state.labeled.size(), mean_likelihood(state.theta, eval)});
    state.history.push_back(curve.back());
    if (state.labeled.size() >= stop_at) break;
    if (state.pool.empty()) throw std::invalid_argument("pool exhausted before stop_at");
    const std::size_t j = select_next(state, strategy);
    state.labeled.samples.push_back({state.pool[j], state.pool_labels[j]});
    state.pool.erase(state.pool.begin() + static_cast<std::ptrdiff_t>(j));
    state.pool_labels.erase(state.pool_labels.begin() + static_cast<std::ptrdiff_t>(j));
    ++state.step;
  }
  return curve;
}

double aulc(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 2) throw std::invalid_argument("aulc needs at least two points");
  double area = 0.0;
  for (std::size_t t = 1; t < curve.size(); ++t) {
    if (curve[t].n_labeled <= curve[t - 1].n_labeled) throw std::invalid_argument("curve n must increase");
    const double w = static_cast<double>(curve[t].n_labeled - curve[t - 1].n_labeled);
    area += 0.5 * w * (curve[t].likelihood + curve[t - 1].likelihood);
  }
  return 100.0 * area / static_cast<double>(curve.back().n_labeled - curve.front().n_labeled);
}

}  // namespace wdru

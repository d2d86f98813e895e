#include "wdru/primal_oracle.hpp"

#include "wdru/dual_solver.hpp"
#include "wdru/lp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wdru {

namespace {

constexpr double kBudgetSlack = 1e-9;
constexpr double kMassTol = 1e-15;

// Variable layout shared by the worst-case and min-radius programs.
struct PlanIndex {
  std::size_t num_points;
  std::size_t num_labeled;
  std::size_t var(std::size_t u, std::size_t k, std::size_t i) const {
    return (u * kNumLabels + k) * num_labeled + i;
  }
  std::size_t size() const { return num_points * kNumLabels * num_labeled; }
};

// Costs c((x_u, y^k), z_i) in plan-variable order.
Eigen::VectorXd plan_costs(const PlanIndex& idx, const std::vector<FeatureVector>& support,
                           const LabeledDataset& data, const TransportCostSpec& cost) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t u = 0; u < idx.num_points; ++u) {
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      for (std::size_t i = 0; i < idx.num_labeled; ++i) {
        const auto& z = data.samples[i];
        c(static_cast<Eigen::Index>(idx.var(u, k, i))) =
            transport_cost(support[u], Label::from_index(k), z.x, z.y, cost);
      }
    }
  }
  return c;
}

// Marginal and label-interval rows common to both programs.
void add_marginal_rows(lp::Problem& p, const PlanIndex& idx, const LabelPrior& prior) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  for (std::size_t i = 0; i < idx.num_labeled; ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (std::size_t u = 0; u < idx.num_points; ++u)
      for (std::size_t k = 0; k < kNumLabels; ++k) row(static_cast<Eigen::Index>(idx.var(u, k, i))) = 1.0;
    p.add_row(row, lp::Sense::kEqual, 1.0 / static_cast<double>(idx.num_labeled));
  }
  for (std::size_t u = 0; u < idx.num_points; ++u) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < kNumLabels; ++k)
      for (std::size_t i = 0; i < idx.num_labeled; ++i) row(static_cast<Eigen::Index>(idx.var(u, k, i))) = 1.0;
    p.add_row(row, lp::Sense::kEqual, 1.0 / static_cast<double>(idx.num_points));
  }
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (std::size_t u = 0; u < idx.num_points; ++u)
      for (std::size_t i = 0; i < idx.num_labeled; ++i) row(static_cast<Eigen::Index>(idx.var(u, k, i))) = 1.0;
    if (prior.upper[k] < 1.0) p.add_row(row, lp::Sense::kLessEqual, prior.upper[k]);
    if (prior.lower[k] > 0.0) p.add_row(row, lp::Sense::kGreaterEqual, prior.lower[k]);
  }
}

CouplingPlan plan_from_solution(const PlanIndex& idx, const Eigen::VectorXd& x) {
  CouplingPlan plan;
  const auto rows = static_cast<Eigen::Index>(idx.num_points * kNumLabels);
  const auto cols = static_cast<Eigen::Index>(idx.num_labeled);
  plan.matrix = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t u = 0; u < idx.num_points; ++u)
    for (std::size_t k = 0; k < kNumLabels; ++k)
      for (std::size_t i = 0; i < idx.num_labeled; ++i)
        plan.matrix(static_cast<Eigen::Index>(u * kNumLabels + k), static_cast<Eigen::Index>(i)) =
            x(static_cast<Eigen::Index>(idx.var(u, k, i)));
  plan.row_marginal = plan.matrix.rowwise().sum();
  plan.col_marginal = plan.matrix.colwise().sum().transpose();
  return plan;
}

LpStatus convert(lp::Status s) {
  switch (s) {
    case lp::Status::kOptimal: return LpStatus::kOptimal;
    case lp::Status::kUnbounded: return LpStatus::kUnbounded;
    case lp::Status::kInfeasible: return LpStatus::kInfeasible;
    case lp::Status::kIterationLimit: break;
  }
  throw NumericalError("simplex hit its pivot limit");
}

void check_instance(const std::vector<FeatureVector>& support, const LabeledDataset& data,
                    const LabelPrior& prior) {
  if (support.empty()) throw std::invalid_argument("support must be nonempty");
  validate(data);
  if (prior.num_labels() != kNumLabels) throw std::invalid_argument("prior must be binary");
  for (const auto& x : support) check_dims(x.size(), static_cast<Eigen::Index>(data.dim()), "support");
}

// Successive shortest paths on the bipartite transport network with real
// masses. Returns the optimal flow (sources x sinks).
Eigen::MatrixXd min_cost_transport(const Eigen::MatrixXd& raw_cost, std::vector<double> supply,
                                   std::vector<double> demand) {
  // Zero potentials need nonnegative costs; a constant shift keeps the optimum.
  const Eigen::MatrixXd c = raw_cost.array() - std::min(0.0, raw_cost.minCoeff());
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  // Node ids: sources 0..n-1, sinks n..n+m-1. Reduced costs stay >= 0 under
  // the potentials, so each search is a plain dense Dijkstra.
  const std::size_t nodes = n + m;
  std::vector<double> potential(nodes, 0.0);
  std::vector<double> dist(nodes);
  std::vector<std::size_t> pred(nodes);
  std::vector<char> done(nodes);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto flow_at = [&](std::size_t i, std::size_t j) -> double& {
    return flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  const auto cost_at = [&](std::size_t i, std::size_t j) {
    return c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };

  while (true) {
    bool any_supply = false, any_demand = false;
    for (double s : supply) any_supply |= s > kMassTol;
    for (double d : demand) any_demand |= d > kMassTol;
    if (!any_supply || !any_demand) break;

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (supply[i] > kMassTol) {
        dist[i] = 0.0;
        pred[i] = nodes;  // root
      }
    }
    std::size_t target = nodes;
    while (true) {
      std::size_t v = nodes;
      for (std::size_t w = 0; w < nodes; ++w)
        if (!done[w] && dist[w] < kInf && (v == nodes || dist[w] < dist[v])) v = w;
      if (v == nodes) break;
      done[v] = 1;
      if (v >= n && demand[v - n] > kMassTol) {
        target = v;
        break;
      }
      if (v < n) {
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t w = n + j;
          if (done[w]) continue;
          const double rc = std::max(0.0, cost_at(v, j) + potential[v] - potential[w]);
          if (dist[v] + rc < dist[w]) {
            dist[w] = dist[v] + rc;
            pred[w] = v;
          }
        }
      } else {
        const std::size_t j = v - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (done[i] || flow_at(i, j) <= kMassTol) continue;
          const double rc = std::max(0.0, -cost_at(i, j) + potential[v] - potential[i]);
          if (dist[v] + rc < dist[i]) {
            dist[i] = dist[v] + rc;
            pred[i] = v;
          }
        }
      }
    }
    if (target == nodes) break;

    double amount = demand[target - n];
    std::size_t v = target;
    while (pred[v] != nodes) {
      const std::size_t u = pred[v];
      if (u >= n) amount = std::min(amount, flow_at(v, u - n));  // backward arc u(sink) -> v(source)
      v = u;
    }
    amount = std::min(amount, supply[v]);
    supply[v] -= amount;
    demand[target - n] -= amount;
    v = target;
    while (pred[v] != nodes) {
      const std::size_t u = pred[v];
      if (u < n) flow_at(u, v - n) += amount;
      else flow_at(v, u - n) -= amount;
      v = u;
    }
    const double dt = dist[target];
    for (std::size_t w = 0; w < nodes; ++w) potential[w] += std::min(dist[w], dt);
  }

  return flow.cwiseMax(0.0);
}

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

DiscreteDistribution DiscreteDistribution::empirical(const LabeledDataset& data) {
  validate(data);
  DiscreteDistribution d;
  d.atoms = data.samples;
  d.weights.assign(data.size(), 1.0 / static_cast<double>(data.size()));
  return d;
}

void validate(const DiscreteDistribution& dist) {
  if (dist.atoms.empty() || dist.atoms.size() != dist.weights.size()) {
    throw std::invalid_argument("distribution needs one weight per atom and at least one atom");
  }
  double total = 0.0;
  for (double w : dist.weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("distribution weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("distribution weights must sum to 1");
}

double CouplingPlan::marginal_error() const {
  const Eigen::VectorXd r = matrix.rowwise().sum();
  const Eigen::VectorXd c = matrix.colwise().sum().transpose();
  return std::max((r - row_marginal).cwiseAbs().maxCoeff(), (c - col_marginal).cwiseAbs().maxCoeff());
}

WassersteinResult discrete_wasserstein(const DiscreteDistribution& mu,
                                       const DiscreteDistribution& nu,
                                       const TransportCostSpec& cost) {
  validate(mu);
  validate(nu);
  const std::size_t n = mu.atoms.size();
  const std::size_t m = nu.atoms.size();
  Eigen::MatrixXd c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          transport_cost(mu.atoms[i], nu.atoms[j], cost);

  WassersteinResult out;
  out.plan.matrix = min_cost_transport(c, mu.weights, nu.weights);
  out.plan.row_marginal = Eigen::Map<const Eigen::VectorXd>(mu.weights.data(), static_cast<Eigen::Index>(n));
  out.plan.col_marginal = Eigen::Map<const Eigen::VectorXd>(nu.weights.data(), static_cast<Eigen::Index>(m));
  out.distance = out.plan.matrix.cwiseProduct(c).sum();
  return out;
}

Eigen::MatrixXd logistic_loss_table(const Theta& theta, const std::vector<FeatureVector>& support) {
  Eigen::MatrixXd loss(static_cast<Eigen::Index>(support.size()), static_cast<Eigen::Index>(kNumLabels));
  for (std::size_t u = 0; u < support.size(); ++u)
    for (std::size_t k = 0; k < kNumLabels; ++k)
      loss(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k)) =
          logistic_loss(theta, support[u], Label::from_index(k));
  return loss;
}

WorstCaseLpResult solve_worst_case_lp(const Eigen::MatrixXd& loss,
                                      const std::vector<FeatureVector>& support,
                                      const LabeledDataset& data, const LabelPrior& prior,
                                      double eps, const TransportCostSpec& cost) {
  check_instance(support, data, prior);
  if (loss.rows() != static_cast<Eigen::Index>(support.size()) ||
      loss.cols() != static_cast<Eigen::Index>(kNumLabels)) {
    throw DimensionError("loss table must be support x labels");
  }
  const PlanIndex idx{support.size(), data.size()};
  lp::Problem p(idx.size(), /*maximize=*/true);
  for (std::size_t u = 0; u < idx.num_points; ++u)
    for (std::size_t k = 0; k < kNumLabels; ++k)
      for (std::size_t i = 0; i < idx.num_labeled; ++i)
        p.objective(static_cast<Eigen::Index>(idx.var(u, k, i))) =
            loss(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k));
  p.add_row(plan_costs(idx, support, data, cost), lp::Sense::kLessEqual, eps + kBudgetSlack);
  add_marginal_rows(p, idx, prior);

  const lp::Solution sol = lp::solve(p);
  WorstCaseLpResult out;
  out.status = convert(sol.status);
  if (out.status == LpStatus::kOptimal) {
    out.value = sol.value;
    out.plan = plan_from_solution(idx, sol.x);
  }
  return out;
}

WorstCaseLpResult solve_worst_case_lp(const Theta& theta, const std::vector<FeatureVector>& support,
                                      const LabeledDataset& data, const LabelPrior& prior,
                                      double eps, const TransportCostSpec& cost) {
  return solve_worst_case_lp(logistic_loss_table(theta, support), support, data, prior, eps, cost);
}

WorstCaseLpResult solve_ball_lp(const Theta& theta, const std::vector<FeatureVector>& candidates,
                                const LabeledDataset& data, double eps,
                                const TransportCostSpec& cost) {
  if (candidates.empty()) throw std::invalid_argument("candidate set must be nonempty");
  validate(data);
  const PlanIndex idx{candidates.size(), data.size()};
  lp::Problem p(idx.size(), /*maximize=*/true);
  for (std::size_t u = 0; u < idx.num_points; ++u)
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      const double l = logistic_loss(theta, candidates[u], Label::from_index(k));
      for (std::size_t i = 0; i < idx.num_labeled; ++i) p.objective(static_cast<Eigen::Index>(idx.var(u, k, i))) = l;
    }
  p.add_row(plan_costs(idx, candidates, data, cost), lp::Sense::kLessEqual, eps + kBudgetSlack);
  const auto n = static_cast<Eigen::Index>(idx.size());
  for (std::size_t i = 0; i < idx.num_labeled; ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (std::size_t u = 0; u < idx.num_points; ++u)
      for (std::size_t k = 0; k < kNumLabels; ++k) row(static_cast<Eigen::Index>(idx.var(u, k, i))) = 1.0;
    p.add_row(row, lp::Sense::kEqual, 1.0 / static_cast<double>(idx.num_labeled));
  }
  const lp::Solution sol = lp::solve(p);
  WorstCaseLpResult out;
  out.status = convert(sol.status);
  if (out.status == LpStatus::kOptimal) {
    out.value = sol.value;
    out.plan = plan_from_solution(idx, sol.x);
  }
  return out;
}

double min_feasible_radius(const LabeledDataset& data, const std::vector<FeatureVector>& support,
                           const LabelPrior& prior, const TransportCostSpec& cost) {
  check_instance(support, data, prior);
  validate(prior);
  const PlanIndex idx{support.size(), data.size()};
  lp::Problem p(idx.size(), /*maximize=*/false);
  p.objective = plan_costs(idx, support, data, cost);
  add_marginal_rows(p, idx, prior);
  const lp::Solution sol = lp::solve(p);
  if (sol.status != lp::Status::kOptimal) {
    throw InfeasibleError("marginal and label constraints cannot be met at any radius");
  }
  return std::max(0.0, sol.value);
}

double min_feasible_radius_bisection(const LabeledDataset& data,
                                     const std::vector<FeatureVector>& support,
                                     const LabelPrior& prior, const TransportCostSpec& cost,
                                     double tol) {
  check_instance(support, data, prior);
  validate(prior);
  const Eigen::MatrixXd zero_loss = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(support.size()),
                                                          static_cast<Eigen::Index>(kNumLabels));
  const auto feasible = [&](double eps) {
    return solve_worst_case_lp(zero_loss, support, data, prior, eps, cost).status == LpStatus::kOptimal;
  };
  // Every plan costs at most the largest single transport cost.
  double hi = 0.0;
  for (const auto& x : support)
    for (std::size_t k = 0; k < kNumLabels; ++k)
      for (const auto& z : data.samples)
        hi = std::max(hi, transport_cost(x, Label::from_index(k), z.x, z.y, cost));
  if (!feasible(hi)) throw InfeasibleError("marginal and label constraints cannot be met at any radius");
  double lo = 0.0;
  if (feasible(lo)) return 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

double min_feasible_radius_flow(const LabeledDataset& data, const std::vector<FeatureVector>& support,
                                const LabelPrior& prior, const TransportCostSpec& cost) {
  check_instance(support, data, prior);
  validate(prior);
  if (prior.num_labels() != 2) throw std::invalid_argument("flow route needs binary labels");
  // Admissible positive-class mass.
  const double lo = std::max(prior.lower[1], 1.0 - prior.upper[0]);
  const double hi = std::min(prior.upper[1], 1.0 - prior.lower[0]);
  if (lo > hi + 1e-12) throw InfeasibleError("marginal and label constraints cannot be met at any radius");

  const auto nl = static_cast<Eigen::Index>(data.size());
  const auto nu = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd keep(nl, nu), to_pos(nl, nu);
  for (Eigen::Index i = 0; i < nl; ++i) {
    const auto& z = data.samples[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < nu; ++j) {
      const auto& x = support[static_cast<std::size_t>(j)];
      keep(i, j) = transport_cost(x, Label::negative(), z.x, z.y, cost);
      to_pos(i, j) = transport_cost(x, Label::positive(), z.x, z.y, cost);
    }
  }
  const std::vector<double> a(static_cast<std::size_t>(nl), 1.0 / static_cast<double>(nl));
  const std::vector<double> b(static_cast<std::size_t>(nu), 1.0 / static_cast<double>(nu));
  // Lagrangian dual of the label-mass constraint: concave in the price.
  const auto dual = [&](double price) {
    const Eigen::MatrixXd c = keep.array().min(to_pos.array() + price).matrix();
    const double ot = min_cost_transport(c, a, b).cwiseProduct(c).sum();
    return ot - price * (price >= 0.0 ? hi : lo);
  };
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double left = -cost.kappa - 1.0, right = cost.kappa + 1.0;
  double m1 = right - golden * (right - left), m2 = left + golden * (right - left);
  double f1 = dual(m1), f2 = dual(m2);
  while (right - left > 1e-10) {
    if (f1 < f2) {
      left = m1;
      m1 = m2;
      f1 = f2;
      m2 = left + golden * (right - left);
      f2 = dual(m2);
    } else {
      right = m2;
      m2 = m1;
      f2 = f1;
      m1 = right - golden * (right - left);
      f1 = dual(m1);
    }
  }
  return std::max({0.0, f1, f2});
}

DualityGap duality_gap_check(const Theta& theta, const LabeledDataset& data,
                             const UnlabeledDataset& support, const LabelPrior& prior, double eps,
                             const TransportCostSpec& cost, const SolverConfig& config) {
  DualityGap out;
  out.eps0 = min_feasible_radius(data, support.points, prior, cost);
  if (eps < out.eps0 - kBudgetSlack) throw InfeasibleError("radius below the minimal feasible radius");
  out.relint_ok = eps > out.eps0 + kBudgetSlack;
  const WorstCaseLpResult primal = solve_worst_case_lp(theta, support.points, data, prior, eps, cost);
  if (primal.status != LpStatus::kOptimal) throw InfeasibleError("worst-case LP is infeasible");
  SolverConfig fixed = config;
  fixed.radius_eps = eps;
  fixed.update_theta = false;
  const SolveResult dual = sgd_solve(data, support, prior, cost, fixed, theta);
  if (dual.status == SolveStatus::kInfeasible) throw InfeasibleError("dual solver reported infeasibility");
  out.primal = primal.value;
  out.dual = dual.objective;
  out.gap = out.dual - out.primal;
  return out;
}

void write_plan_csv(const CouplingPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "row,col,mass\n";
  for (Eigen::Index r = 0; r < plan.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < plan.matrix.cols(); ++c)
      if (plan.matrix(r, c) != 0.0) out << r << ',' << c << ',' << plan.matrix(r, c) << '\n';
}

}  // namespace wdru

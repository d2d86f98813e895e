// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acceptance <path-to-wdru_cli> <source-dir>

#include "wdru/active_learning.hpp"
#include "wdru/baseline.hpp"
#include "wdru/config.hpp"
#include "wdru/dual_solver.hpp"
#include "wdru/experiment.hpp"
#include "wdru/guarantees.hpp"
#include "wdru/primal_oracle.hpp"
#include "wdru/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace wdru;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FeatureVector random_point(CounterRng& rng, std::size_t dim, double radius = 1.0) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
  for (auto& v : x) v = radius * (2.0 * rng.uniform() - 1.0);
  return with_bias(x);
}

LabeledDataset random_labeled(CounterRng& rng, std::size_t n, std::size_t dim, double radius = 1.0) {
  LabeledDataset d;
  for (std::size_t i = 0; i < n; ++i) d.samples.push_back({random_point(rng, dim, radius), Label::from_index(rng.index(2))});
  return d;
}

Theta random_theta(CounterRng& rng, std::size_t dim) {
  Theta t(static_cast<Eigen::Index>(dim + 1));
  for (auto& v : t) v = rng.normal();
  return t;
}

std::vector<std::map<std::string, std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::map<std::string, std::string> row;
    std::string cell;
    for (const auto& h : header) {
      std::getline(ss, cell, ',');
      row[h] = cell;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Dual variables flattened as (alpha, beta, lambda_upper, lambda_lower).
Eigen::VectorXd dual_block(const DualState& s) {
  const Eigen::Index nb = s.beta.size(), nk = s.lambda_upper.size();
  Eigen::VectorXd v(1 + nb + 2 * nk);
  v << s.alpha, s.beta, s.lambda_upper, s.lambda_lower;
  return v;
}

Eigen::VectorXd dual_block(const PhiSubgradient& g) {
  const Eigen::Index nb = g.beta.size(), nk = g.lambda_upper.size();
  Eigen::VectorXd v(1 + nb + 2 * nk);
  v << g.alpha, g.beta, g.lambda_upper, g.lambda_lower;
  return v;
}

DualState random_state(CounterRng& rng, std::size_t dim, std::size_t n) {
  DualState s = DualState::zeros(random_theta(rng, dim), n);
  s.alpha = 2.0 * rng.uniform();
  for (auto& b : s.beta) b = rng.normal();
  for (auto& l : s.lambda_upper) l = rng.uniform();
  for (auto& l : s.lambda_lower) l = rng.uniform();
  return s;
}

// 1. Primal LP value against the converged dual on random small instances.
Verdict strong_duality() {
  const auto t0 = std::chrono::steady_clock::now();
  const TransportCostSpec cost{1.0};
  double worst = 0.0;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < 25; ++i) {
    const std::uint64_t seed = derive_seed(101, i);
    const OracleInstance inst = random_oracle_instance(seed, 3, 5, 3, i % 2 == 0);
    const double eps = min_feasible_radius(inst.data, inst.support.points, inst.prior, cost) + 0.1;
    SolverConfig cfg;
    cfg.seed = seed;
    const DualityGap g = duality_gap_check(inst.theta, inst.data, inst.support, inst.prior, eps, cost, cfg);
    const double rel = std::abs(g.gap) / (1.0 + std::abs(g.primal));
    worst = std::max(worst, rel);
    failures += rel > 1e-3;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs <= 300.0,
          "25 instances, worst |primal-dual|/(1+|primal|) = " + fmt(worst) + " (tol 1e-3), " + fmt(secs) +
              " s (limit 300 s)"};
}

// 2. Subgradients against central differences; convexity of Phi in the dual block.
Verdict subgradients() {
  CounterRng rng(202);
  const TransportCostSpec cost{1.3};
  const double h = 1e-6;
  std::size_t tested = 0, fd_fail = 0, cvx_fail = 0;
  double worst_fd = 0.0, worst_cvx = 0.0;
  while (tested < 1000) {
    const std::size_t dim = 1 + rng.index(3), n = 1 + rng.index(4);
    const LabeledDataset data = random_labeled(rng, n, dim);
    const DualState s = random_state(rng, dim, n);
    const FeatureVector x = random_point(rng, dim);
    const PhiMax m = phi_max(x, s, data, cost);
    double second = -1e300;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < kNumLabels; ++k)
        if (!(ArgmaxCell{i, k} == m.argmax)) second = std::max(second, phi_ik(x, {i, k}, s, data, cost));
    if (m.value - second < 1e-3) continue;  // not argmax-stable under the probe step
    ++tested;

    const PhiSubgradient g = phi_subgradients(x, s, data, cost);
    const auto phi = [&](const DualState& t) { return phi_max(x, t, data, cost).value; };
    Eigen::VectorXd analytic(g.theta.size() + dual_block(g).size());
    analytic << g.theta, dual_block(g);
    Eigen::VectorXd numeric(analytic.size());
    Eigen::Index j = 0;
    for (Eigen::Index a = 0; a < s.theta.size(); ++a, ++j) {
      DualState p = s, q = s;
      p.theta(a) += h;
      q.theta(a) -= h;
      numeric(j) = (phi(p) - phi(q)) / (2 * h);
    }
    const auto perturb = [&](auto member, Eigen::Index a, double d) {
      DualState t = s;
      if constexpr (std::is_same_v<decltype(member), double DualState::*>) {
        t.*member += d;
      } else {
        (t.*member)(a) += d;
      }
      return phi(t);
    };
    numeric(j++) = (perturb(&DualState::alpha, 0, h) - perturb(&DualState::alpha, 0, -h)) / (2 * h);
    for (auto member : {&DualState::beta, &DualState::lambda_upper, &DualState::lambda_lower}) {
      for (Eigen::Index a = 0; a < (s.*member).size(); ++a, ++j) {
        numeric(j) = (perturb(member, a, h) - perturb(member, a, -h)) / (2 * h);
      }
    }
    const double rel = (analytic - numeric).norm() / numeric.norm();
    worst_fd = std::max(worst_fd, rel);
    fd_fail += rel > 1e-5;

    // Phi(s2) >= Phi(s) + <g, s2 - s> with theta held fixed.
    DualState s2 = random_state(rng, dim, n);
    s2.theta = s.theta;
    const double lhs = phi(s2);
    const double rhs = m.value + dual_block(g).dot(dual_block(s2) - dual_block(s));
    worst_cvx = std::max(worst_cvx, rhs - lhs);
    cvx_fail += lhs < rhs - 1e-10;
  }
  return {fd_fail == 0 && cvx_fail == 0, "1000 points, worst relative FD error " + fmt(worst_fd) +
                                             " (tol 1e-5); worst convexity violation " + fmt(worst_cvx) +
                                             " (tol 1e-10)"};
}

// 3. Minimal radius: LP against bisection, and the forced-flip instance.
Verdict minimal_radius() {
  const TransportCostSpec cost{1.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const OracleInstance inst = random_oracle_instance(derive_seed(303, i), 3, 5, 3, i % 2 == 0);
    const double lp = min_feasible_radius(inst.data, inst.support.points, inst.prior, cost);
    const double bis = min_feasible_radius_bisection(inst.data, inst.support.points, inst.prior, cost);
    worst = std::max(worst, std::abs(lp - bis));
  }
  const double kappa = 1.7;
  LabeledDataset flip;
  flip.samples.push_back({with_bias(Eigen::Vector2d(0.4, -0.3)), Label::negative()});
  const std::vector<FeatureVector> support{flip.samples[0].x};
  const double e_flip = min_feasible_radius(flip, support, LabelPrior::exact({0.0, 1.0}), TransportCostSpec{kappa});
  const bool ok = worst <= 1e-6 && e_flip == kappa;
  return {ok, "10 instances, worst |LP - bisection| = " + fmt(worst) + " (tol 1e-6); forced flip eps0 = " +
                  std::to_string(e_flip) + " vs kappa = " + std::to_string(kappa)};
}

// 4. The bound at z = 0 lower-bounds the likelihood of feasible distributions.
Verdict bound_validity() {
  const TransportCostSpec cost{1.0};
  double worst_margin = 1e300;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    const std::uint64_t seed = derive_seed(404, i);
    const OracleInstance inst = random_oracle_instance(seed, 3, 5, 3, i % 2 == 0);
    const double eps = min_feasible_radius(inst.data, inst.support.points, inst.prior, cost) + 0.1;
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.radius_eps = eps;
    const SolveResult r = sgd_solve(inst.data, inst.support, inst.prior, cost, cfg, Theta::Zero(inst.theta.size()));
    const Theta& theta = r.state.theta;
    const double bound = performance_bound(r.state, inst.data, inst.support, inst.prior, eps, cost, 0.0).likelihood_bound;
    const Eigen::MatrixXd loss = logistic_loss_table(theta, inst.support.points);
    // Vertices of the decision set reached by random linear objectives, plus the worst case.
    CounterRng rng(seed);
    for (int v = 0; v <= 20; ++v) {
      Eigen::MatrixXd obj = loss;
      if (v > 0)
        for (auto& e : obj.reshaped()) e = rng.normal();
      const WorstCaseLpResult lp = solve_worst_case_lp(obj, inst.support.points, inst.data, inst.prior, eps, cost);
      if (lp.status != LpStatus::kOptimal) return {false, "oracle LP failed on instance " + std::to_string(i)};
      const Eigen::VectorXd mass = lp.plan.matrix.rowwise().sum();
      double expected = 0.0;
      for (Eigen::Index row = 0; row < mass.size(); ++row) {
        expected += mass(row) * loss(row / static_cast<Eigen::Index>(kNumLabels), row % static_cast<Eigen::Index>(kNumLabels));
      }
      worst_margin = std::min(worst_margin, std::exp(-expected) - bound);
      ++checked;
    }
  }
  CounterRng rng(405);
  const LabeledDataset data = random_labeled(rng, 4, 2);
  UnlabeledDataset unl;
  for (int j = 0; j < 6; ++j) unl.points.push_back(random_point(rng, 2));
  const double zero = performance_bound(DualState::zeros(Theta::Zero(3), 4), data, unl, LabelPrior::exact({0.5, 0.5}),
                                        0.2, cost, 0.0)
                          .likelihood_bound;
  return {worst_margin >= -1e-6 && zero == 0.5,
          std::to_string(checked) + " feasible distributions on 10 instances, min(likelihood - bound) = " +
              fmt(worst_margin) + " (tol -1e-6); theta = 0 bound = " + fmt(zero)};
}

// 5. Synthetic contrast between the plain Wasserstein ball and the constrained set.
Verdict synthetic_contrast() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig c = parse_config(
      "kind = bound-vs-nl\n"
      "dataset = synthetic\n"
      "synthetic_rows = 500\n"
      "synthetic_dim = 10\n"
      "synthetic_separation = 4\n"
      "seed = 3\n"
      "trials = 10\n"
      "n_labeled = 20\n"
      "prior = strong\n"
      "eps_policy = fraction-of-true-distance\n"
      "fraction = 1\n"
      "z_score = 0\n");
  c.output = (fs::temp_directory_path() / "wdru_acceptance_contrast.csv").string();
  const ExperimentReport report = run_experiment(c);
  std::map<std::string, std::map<std::string, std::string>> base, dru;
  for (const auto& row : read_rows(c.output)) (row.at("method") == "baseline" ? base : dru)[row.at("trial")] = row;
  std::size_t good = 0;
  std::ostringstream per;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const std::string key = std::to_string(t);
    if (!base.count(key) || !dru.count(key)) {
      per << " x";
      continue;
    }
    const double bc = std::stod(base[key]["median_confidence"]), bb = std::stod(base[key]["likelihood_bound"]);
    const double dc = std::stod(dru[key]["median_confidence"]), db = std::stod(dru[key]["likelihood_bound"]);
    const bool ok = bc <= 0.55 && bb <= 0.5 + 1e-3 && dc >= 0.7 && db >= 0.55;
    good += ok;
    per << (ok ? " +" : " -");
  }
  const double secs = seconds_since(t0);
  return {good >= 8 && secs <= 1200.0 && report.exit_code() == 0,
          std::to_string(good) + "/10 seeds show the contrast (need 8) [" + per.str() + " ], " + fmt(secs) +
              " s (limit 1200 s)"};
}

// 6. Baseline against the compact-support LP.
Verdict baseline_oracle() {
  CounterRng rng(606);
  std::size_t below = 0, tight = 0, tight_fail = 0;
  double worst_gap = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const TransportCostSpec cost{0.5 + rng.uniform()};
    const LabeledDataset data = random_labeled(rng, 2 + rng.index(3), 1);
    Theta theta(2);
    theta << 2.0 * rng.normal(), rng.normal();
    const double eps = 0.02 + 0.5 * rng.uniform();
    // Grid on [-3, 3] plus the data points themselves.
    std::vector<FeatureVector> grid;
    for (int g = 0; g <= 120; ++g) grid.push_back(with_bias(Eigen::VectorXd::Constant(1, -3.0 + 0.05 * g)));
    for (const auto& s : data.samples) grid.push_back(s.x);
    const WorstCaseLpResult lp = solve_ball_lp(theta, grid, data, eps, cost);
    const BaselineInner inner = baseline_inner(theta, data, eps, cost);
    if (lp.status != LpStatus::kOptimal) return {false, "ball LP failed"};
    // The LP budget row carries a 1e-9 slack, so compare at the same radius.
    below += baseline_worst_case(theta, data, eps + 1e-9, cost) >= lp.value - 1e-12;
    if (inner.alpha > std::abs(theta(0)) + 0.1) {
      ++tight;
      worst_gap = std::max(worst_gap, inner.value - lp.value);
      tight_fail += inner.value - lp.value > 2e-2;
    }
  }
  double worst_zero = 0.0;
  for (int t = 0; t < 20; ++t) {
    const LabeledDataset data = random_labeled(rng, 1 + rng.index(8), 3);
    const Theta theta = random_theta(rng, 3);
    double empirical = 0.0;
    for (const auto& s : data.samples) empirical += logistic_loss(theta, s.x, s.y);
    empirical /= static_cast<double>(data.size());
    worst_zero = std::max(worst_zero, std::abs(baseline_worst_case(theta, data, 0.0, TransportCostSpec{}) - empirical));
  }
  return {below == 20 && tight > 0 && tight_fail == 0 && worst_zero <= 1e-12,
          std::to_string(below) + "/20 baseline >= LP; " + std::to_string(tight) +
              " instances with alpha* > L + 0.1, worst gap " + fmt(worst_gap) + " (tol 2e-2); eps = 0 error " +
              fmt(worst_zero) + " (tol 1e-12)"};
}

// 7. Robustness sweep is nonincreasing in the evaluation margin.
Verdict robustness_shape() {
  CounterRng rng(707);
  SolverConfig cfg;
  cfg.max_steps = 5000;
  cfg.min_steps = 1000;
  std::size_t rows = 0, violations = 0;
  const std::vector<double> eps_grid{1e-3, 1e-2, 1e-1, 1.0};
  const std::vector<double> delta_grid{0.0, 1e-3, 1e-2, 1e-1, 1.0};
  for (int inst = 0; inst < 5; ++inst) {
    const LabeledDataset data = random_labeled(rng, 10 + rng.index(10), 3);
    const auto cells = robustness_sweep(data, eps_grid, delta_grid, TransportCostSpec{}, cfg);
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      ++rows;
      for (std::size_t d = 1; d < delta_grid.size(); ++d) {
        violations += cells[e * delta_grid.size() + d].likelihood > cells[e * delta_grid.size() + d - 1].likelihood;
      }
    }
  }
  return {violations == 0, std::to_string(rows) + " sweep rows on 5 instances, " + std::to_string(violations) +
                               " increases in delta"};
}

// 8. Active-learning scores.
Verdict active_learning() {
  CounterRng rng(808);
  double worst_emc = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t dim = 1 + rng.index(5);
    const Theta theta = random_theta(rng, dim);
    const FeatureVector x = random_point(rng, dim, 3.0);
    const double p1 = logistic_predict(theta, x);
    const double enumerated = p1 * impact_gradient_norm(theta, x, Label::positive()) +
                              (1.0 - p1) * impact_gradient_norm(theta, x, Label::negative());
    worst_emc = std::max(worst_emc, std::abs(score_emc(theta, x) - enumerated));
  }
  std::vector<CurvePoint> flat;
  for (std::size_t n = 20; n <= 100; ++n) flat.push_back({n, 0.954});
  const double area = aulc(flat);

  // The positive-only prior with the fixed X-marginal leaves a single feasible
  // distribution at every eps >= eps0, so the robust score is the impact of
  // the positive label.
  LabeledDataset data;
  data.samples.push_back({with_bias(Eigen::Vector2d(1.0, 0.0)), Label::positive()});
  data.samples.push_back({with_bias(Eigen::Vector2d(0.0, 1.0)), Label::positive()});
  data.samples.push_back({with_bias(Eigen::Vector2d(-1.0, 0.0)), Label::negative()});
  UnlabeledDataset unl;
  unl.points = {with_bias(Eigen::Vector2d(1.0, 0.2)), with_bias(Eigen::Vector2d(0.1, 1.0)),
                with_bias(Eigen::Vector2d(-1.0, -0.3))};
  Theta theta(3);
  theta << 0.7, -0.4, 0.1;
  const LabelPrior prior = LabelPrior::exact({0.0, 1.0});
  const TransportCostSpec cost{1.0};
  const double eps = prior_min_radius(data, unl, prior, cost) + 0.1;
  SolverConfig cfg = StrategyConfig::default_dr_solver();
  double worst_dr = 0.0, worst_lp = 0.0;
  for (std::size_t j = 0; j < unl.size(); ++j) {
    const double forced = impact_gradient_norm(theta, unl.points[j], Label::positive());
    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(unl.size()), 2);
    for (std::size_t k = 0; k < kNumLabels; ++k)
      table(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          -impact_gradient_norm(theta, unl.points[j], Label::from_index(k));
    const double lp = -solve_worst_case_lp(table, unl.points, data, prior, eps, cost).value *
                      static_cast<double>(unl.size());
    cfg.seed = j;
    const double dr = score_dr(unl.points[j], data, unl, prior, eps, cost, theta, cfg);
    worst_lp = std::max(worst_lp, std::abs(lp - forced));
    worst_dr = std::max(worst_dr, std::abs(dr - forced));
  }
  return {worst_emc <= 1e-12 && std::abs(area - 95.4) <= 1e-9 && worst_dr <= 1e-3 && worst_lp <= 1e-9,
          "EMC vs enumeration " + fmt(worst_emc) + " (tol 1e-12); AULC(0.954) = " + std::to_string(area) +
              "; DR vs forced-label impact " + fmt(worst_dr) + " (tol 1e-3), LP oracle vs forced " + fmt(worst_lp)};
}

// 9. Exact OT against coupling enumeration, and the triangle inequality.
Verdict ot_exactness() {
  CounterRng rng(909);
  const TransportCostSpec cost{1.0};
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::size_t n : {2, 3}) {
    for (int t = 0; t < 50; ++t, ++cases) {
      const LabeledDataset a = random_labeled(rng, n, 2), b = random_labeled(rng, n, 2);
      // Uniform equal-size marginals: the extreme couplings are the permutations.
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e300;
      do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += transport_cost(a.samples[i], b.samples[perm[i]], cost);
        best = std::min(best, total / static_cast<double>(n));
      } while (std::next_permutation(perm.begin(), perm.end()));
      const double w =
          discrete_wasserstein(DiscreteDistribution::empirical(a), DiscreteDistribution::empirical(b), cost).distance;
      worst = std::max(worst, std::abs(w - best));
    }
  }
  double worst_triangle = -1e300;
  for (int t = 0; t < 100; ++t) {
    std::vector<DiscreteDistribution> d;
    for (int k = 0; k < 3; ++k) d.push_back(DiscreteDistribution::empirical(random_labeled(rng, 1 + rng.index(6), 2)));
    const double ab = discrete_wasserstein(d[0], d[1], cost).distance;
    const double bc = discrete_wasserstein(d[1], d[2], cost).distance;
    const double ac = discrete_wasserstein(d[0], d[2], cost).distance;
    worst_triangle = std::max(worst_triangle, ac - ab - bc);
  }
  return {worst <= 1e-9 && worst_triangle <= 1e-12,
          std::to_string(cases) + " 2x2/3x3 instances, worst error " + fmt(worst) +
              " (tol 1e-9); 100 triples, max W(a,c) - W(a,b) - W(b,c) = " + fmt(worst_triangle)};
}

// 10. Every CLI subcommand twice with identical config and seed.
Verdict determinism(const std::string& cli, const std::string& source_dir) {
  struct Run {
    std::string subcommand, config;
  };
  const std::vector<Run> runs{{"train-dru", "train_dru"},     {"train-baseline", "train_baseline"},
                              {"bound", "bound"},             {"min-radius", "min_radius"},
                              {"wasserstein", "wasserstein"}, {"radius-sweep", "radius_sweep"},
                              {"robustness-sweep", "robustness_sweep"}, {"active", "active"},
                              {"oracle-check", "oracle_check"}};
  const fs::path tmp = fs::temp_directory_path() / "wdru_acceptance_cli";
  fs::create_directories(tmp);
  std::size_t same = 0;
  std::string failed;
  for (const auto& r : runs) {
    std::string outputs[2];
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
      const std::string out = (tmp / (r.config + "_" + std::to_string(k) + ".csv")).string();
      const std::string cmd = "cd '" + source_dir + "' && '" + cli + "' " + r.subcommand + " --config configs/" +
                              r.config + ".conf --output '" + out + "' > /dev/null";
      ran &= std::system(cmd.c_str()) == 0;
      outputs[k] = slurp(out);
    }
    if (ran && !outputs[0].empty() && outputs[0] == outputs[1]) {
      ++same;
    } else {
      failed += " " + r.subcommand;
    }
  }
  return {same == runs.size(), std::to_string(same) + "/" + std::to_string(runs.size()) +
                                   " subcommands byte-identical" + (failed.empty() ? "" : "; differ:" + failed)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <wdru_cli> <source-dir>\n";
    return 1;
  }
  const std::string cli = argv[1], source_dir = argv[2];
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"strong duality", strong_duality},
      {"subgradient correctness", subgradients},
      {"minimal radius consistency", minimal_radius},
      {"bound validity", bound_validity},
      {"synthetic contrast", synthetic_contrast},
      {"baseline oracle agreement", baseline_oracle},
      {"robustness sweep shape", robustness_shape},
      {"active-learning formulas", active_learning},
      {"OT exactness", ot_exactness},
      {"determinism", [&] { return determinism(cli, source_dir); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [PRIMARY] " << (i + 1) << ". " << criteria[i].first << ": "
              << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}

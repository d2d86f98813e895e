#include "doctest.h"

#include "test_support.hpp"
#include "wdru/dual_solver.hpp"
#include "wdru/primal_oracle.hpp"

#include <cmath>

using namespace wdru;
using namespace wdru::testing;

TEST_CASE("phi at a single cell") {
  // theta = 0, alpha = 1, ||x - x_i|| = 3, beta = 2, same label.
  LabeledDataset data;
  data.samples.push_back({fv({0.0, 0.0}), Label::positive()});
  DualState s = DualState::zeros(Theta::Zero(3), 1);
  s.alpha = 1.0;
  s.beta(0) = 2.0;
  const FeatureVector x = fv({3.0, 0.0});
  CHECK(phi_ik(x, {0, 1}, s, data, TransportCostSpec{1.0}) == doctest::Approx(std::log(2.0) - 5.0).epsilon(1e-12));
  // Flipping the label adds kappa to the cost.
  CHECK(phi_ik(x, {0, 0}, s, data, TransportCostSpec{1.0}) == doctest::Approx(std::log(2.0) - 6.0).epsilon(1e-12));
  const PhiMax m = phi_max(x, s, data, TransportCostSpec{1.0});
  CHECK(m.argmax == ArgmaxCell{0, 1});
}

TEST_CASE("ties in the inner maximum go to the first cell") {
  LabeledDataset data;
  data.samples.push_back({fv({1.0}), Label::negative()});
  data.samples.push_back({fv({1.0}), Label::negative()});
  DualState s = DualState::zeros(Theta::Zero(2), 2);
  // alpha = 0 makes every cell equal.
  const PhiMax m = phi_max(fv({0.0}), s, data, TransportCostSpec{1.0});
  CHECK(m.argmax == ArgmaxCell{0, 0});
  CHECK(m.value == doctest::Approx(std::log(2.0)));
}

TEST_CASE("subgradients agree with finite differences away from kinks") {
  CounterRng rng(10);
  const TransportCostSpec cost{1.3};
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto data = random_labeled(rng, 3, 2);
    DualState s = DualState::zeros(random_theta(rng, 2), 3);
    s.alpha = 0.5 + rng.uniform();
    for (auto& b : s.beta) b = rng.normal();
    for (auto& l : s.lambda_upper) l = rng.uniform();
    for (auto& l : s.lambda_lower) l = rng.uniform();
    const FeatureVector x = random_point(rng, 2);
    const PhiSubgradient g = phi_subgradients(x, s, data, cost);
    const double h = 1e-6;
    auto phi = [&](const DualState& t) { return phi_max(x, t, data, cost).value; };
    const ArgmaxCell cell = phi_max(x, s, data, cost).argmax;
    // Skip near-ties where the maximum is not differentiable.
    bool kink = false;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 2; ++k)
        if (!(ArgmaxCell{i, k} == cell) &&
            phi_max(x, s, data, cost).value - phi_ik(x, {i, k}, s, data, cost) < 1e-4)
          kink = true;
    if (kink) continue;
    ++checked;
    for (Eigen::Index j = 0; j < s.theta.size(); ++j) {
      DualState p = s, m = s;
      p.theta(j) += h;
      m.theta(j) -= h;
      CHECK(g.theta(j) == doctest::Approx((phi(p) - phi(m)) / (2 * h)).epsilon(1e-5).scale(1.0));
    }
    DualState p = s, m = s;
    p.alpha += h;
    m.alpha -= h;
    CHECK(g.alpha == doctest::Approx((phi(p) - phi(m)) / (2 * h)).epsilon(1e-5).scale(1.0));
    for (Eigen::Index i = 0; i < 3; ++i) {
      DualState bp = s, bm = s;
      bp.beta(i) += h;
      bm.beta(i) -= h;
      CHECK(g.beta(i) == doctest::Approx((phi(bp) - phi(bm)) / (2 * h)).epsilon(1e-5).scale(1.0));
    }
    for (Eigen::Index k = 0; k < 2; ++k) {
      DualState up = s, um = s;
      up.lambda_upper(k) += h;
      um.lambda_upper(k) -= h;
      CHECK(g.lambda_upper(k) == doctest::Approx((phi(up) - phi(um)) / (2 * h)).epsilon(1e-5).scale(1.0));
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("dual objective is the linear terms plus the mean of phi") {
  CounterRng rng(11);
  const auto data = random_labeled(rng, 3, 2);
  const auto unl = random_unlabeled(rng, 6, 2);
  const auto prior = LabelPrior{{0.2, 0.3}, {0.7, 0.8}};
  DualState s = DualState::zeros(random_theta(rng, 2), 3);
  s.alpha = 0.7;
  s.beta << 0.1, -0.2, 0.3;
  s.lambda_upper << 0.2, 0.0;
  s.lambda_lower << 0.0, 0.4;
  const TransportCostSpec cost{1.0};
  const double lin = 0.7 * 0.5 + (0.1 - 0.2 + 0.3) / 3.0 + (0.2 * 0.7 + 0.0 * 0.8) - (0.0 * 0.2 + 0.4 * 0.3);
  CHECK(dual_linear_terms(s, prior, 0.5) == doctest::Approx(lin).epsilon(1e-14));
  double mean_phi = 0.0;
  for (double v : phi_values(s, data, unl, cost)) mean_phi += v / 6.0;
  CHECK(dual_objective(s, data, unl, prior, 0.5, cost) == doctest::Approx(lin + mean_phi).epsilon(1e-14));
  // The loss-table overload reproduces the logistic objective.
  const Eigen::MatrixXd table = logistic_loss_table(s.theta, unl.points);
  CHECK(dual_objective(table, s, data, unl, prior, 0.5, cost) ==
        doctest::Approx(dual_objective(s, data, unl, prior, 0.5, cost)).epsilon(1e-12));
}

TEST_CASE("every dual point upper-bounds the exact worst case") {
  CounterRng rng(12);
  const auto data = random_labeled(rng, 2, 2);
  const auto unl = random_unlabeled(rng, 3, 2);
  const auto prior = LabelPrior::exact({0.5, 0.5});
  const TransportCostSpec cost{1.0};
  const Theta theta = random_theta(rng, 2);
  const double eps = min_feasible_radius(data, unl.points, prior, cost) + 0.2;
  const double primal = solve_worst_case_lp(theta, unl.points, data, prior, eps, cost).value;
  for (int t = 0; t < 200; ++t) {
    DualState s = DualState::zeros(theta, 2);
    s.alpha = 3.0 * rng.uniform();
    for (auto& b : s.beta) b = rng.normal();
    for (auto& l : s.lambda_upper) l = rng.uniform();
    for (auto& l : s.lambda_lower) l = rng.uniform();
    CHECK(dual_objective(s, data, unl, prior, eps, cost) >= primal - 1e-9);
  }
}

TEST_CASE("solver is deterministic under a fixed seed") {
  CounterRng rng(13);
  const auto data = random_labeled(rng, 3, 2);
  const auto unl = random_unlabeled(rng, 8, 2);
  const auto prior = LabelPrior::exact({0.5, 0.5});
  SolverConfig cfg;
  cfg.radius_eps = min_feasible_radius(data, unl.points, prior, TransportCostSpec{}) + 0.3;
  cfg.max_steps = 3000;
  cfg.min_steps = 1000;
  cfg.batch_size = 4;
  cfg.seed = 99;
  const auto a = sgd_solve(data, unl, prior, TransportCostSpec{}, cfg, Theta::Zero(3));
  const auto b = sgd_solve(data, unl, prior, TransportCostSpec{}, cfg, Theta::Zero(3));
  CHECK(a.objective == b.objective);
  CHECK(a.steps == b.steps);
  CHECK(a.state.theta == b.state.theta);
  CHECK(a.state.alpha >= 0.0);
  CHECK((a.state.lambda_upper.array() >= 0.0).all());
}

TEST_CASE("fixed-theta solve closes the duality gap") {
  CounterRng rng(14);
  const auto data = random_labeled(rng, 2, 2);
  const auto unl = random_unlabeled(rng, 4, 2);
  const auto prior = LabelPrior::exact({0.4, 0.6});
  const TransportCostSpec cost{1.0};
  const Theta theta = random_theta(rng, 2);
  const double eps = min_feasible_radius(data, unl.points, prior, cost) + 0.1;
  SolverConfig cfg;
  cfg.seed = 1;
  const DualityGap g = duality_gap_check(theta, data, unl, prior, eps, cost, cfg);
  CHECK(g.gap >= -1e-9);
  CHECK(g.gap <= 1e-3 * (1.0 + std::abs(g.primal)));
}

TEST_CASE("radius below the minimum is reported infeasible") {
  LabeledDataset data;
  data.samples.push_back({fv({0.0}), Label::negative()});
  UnlabeledDataset unl;
  unl.points.push_back(fv({0.0}));
  const auto prior = LabelPrior::exact({0.0, 1.0});
  SolverConfig cfg;
  cfg.radius_eps = 0.5;  // flip costs kappa = 1
  cfg.max_steps = 20000;
  cfg.min_steps = 1000;
  const auto r = sgd_solve(data, unl, prior, TransportCostSpec{1.0}, cfg, Theta::Zero(2));
  CHECK(r.status == SolveStatus::kInfeasible);
  CHECK_THROWS_AS(train_dru(data, unl, prior, TransportCostSpec{1.0}, cfg), InfeasibleError);
}

TEST_CASE("invalid configurations and states are rejected") {
  SolverConfig cfg;
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  DualState s = DualState::zeros(Theta::Zero(2), 2);
  s.alpha = -1.0;
  CHECK_THROWS_AS(validate(s, 2), std::invalid_argument);
}

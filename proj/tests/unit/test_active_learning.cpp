#include "doctest.h"

#include "test_support.hpp"
#include "wdru/active_learning.hpp"
#include "wdru/data.hpp"
#include "wdru/guarantees.hpp"
#include "wdru/primal_oracle.hpp"

#include <cmath>

using namespace wdru;
using namespace wdru::testing;

namespace {

LabeledDataset ridge_instance() {
  LabeledDataset d;
  for (int i = 0; i < 20; ++i) {
    const double x1 = std::cos(0.7 * i) * (1.0 + 0.1 * i);
    const double x2 = std::sin(1.3 * i);
    d.samples.push_back({fv({x1, x2}), (7 * i) % 3 == 0 ? Label::positive() : Label::negative()});
  }
  return d;
}

}  // namespace

TEST_CASE("ridge logistic regression reference solution") {
  const auto data = ridge_instance();
  const Theta theta = erm_train_l2(data, 1e-3);
  CHECK(theta(0) == doctest::Approx(0.03863174).epsilon(1e-6).scale(1.0));
  CHECK(theta(1) == doctest::Approx(-0.29900525).epsilon(1e-6).scale(1.0));
  CHECK(theta(2) == doctest::Approx(-0.63079549).epsilon(1e-6).scale(1.0));
  double obj = 1e-3 * theta.squaredNorm();
  for (const auto& s : data.samples) obj += logistic_loss(theta, s.x, s.y) / 20.0;
  CHECK(obj == doctest::Approx(0.642372766212).epsilon(1e-10));
}

TEST_CASE("model-change scores") {
  const FeatureVector x = fv({std::sqrt(8.0)});  // ||x|| = 3 with the bias
  CHECK(score_emc(Theta::Zero(2), x) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(score_min_mc(Theta::Zero(2), x) == doctest::Approx(0.5));
  CHECK(score_min_mc(Theta::Zero(2), x, true) == doctest::Approx(1.5));
  CHECK(impact_gradient_norm(Theta::Zero(2), x, Label::positive()) == doctest::Approx(1.5));

  CounterRng rng(1);
  for (int t = 0; t < 100; ++t) {
    const Theta theta = random_theta(rng, 3);
    const FeatureVector p = random_point(rng, 3);
    const double p1 = logistic_predict(theta, p);
    const double expected = p1 * impact_gradient_norm(theta, p, Label::positive()) +
                            (1.0 - p1) * impact_gradient_norm(theta, p, Label::negative());
    CHECK(score_emc(theta, p) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(score_max_mc(theta, p) == doctest::Approx(std::max(p1, 1.0 - p1)).epsilon(1e-14));
  }
}

TEST_CASE("area under the learning curve") {
  CHECK(aulc({{20, 0.954}, {30, 0.954}, {40, 0.954}}) == doctest::Approx(95.4));
  CHECK(aulc({{1, 0.5}, {5, 0.5}}) == doctest::Approx(50.0));
  CHECK(aulc({{0, 0.0}, {10, 0.5}, {20, 1.0}}) == doctest::Approx(50.0));
  CHECK_THROWS(aulc({{1, 0.5}}));
  CHECK_THROWS(aulc({{2, 0.5}, {2, 0.6}}));
}

TEST_CASE("strategy names round-trip") {
  for (auto k : {StrategyKind::kRandom, StrategyKind::kEmc, StrategyKind::kMinMc, StrategyKind::kMaxMc,
                 StrategyKind::kDrStrong, StrategyKind::kDrWeak}) {
    CHECK(parse_strategy(to_string(k)) == k);
  }
  CHECK_THROWS(parse_strategy("oracle"));
}

TEST_CASE("ties in the selection go to the lowest index") {
  ActiveState s;
  s.theta = Theta::Zero(2);
  s.pool = {fv({1.0}), fv({-1.0}), fv({1.0})};
  s.pool_labels = {Label::positive(), Label::negative(), Label::positive()};
  StrategyConfig cfg;
  cfg.kind = StrategyKind::kEmc;
  CHECK(select_next(s, cfg) == 0);
  s.pool.push_back(fv({2.0}));
  s.pool_labels.push_back(Label::positive());
  CHECK(select_next(s, cfg) == 3);
}

TEST_CASE("robust score matches the exact linear program") {
  CounterRng rng(2);
  const auto data = random_labeled(rng, 2, 2);
  const auto unl = random_unlabeled(rng, 4, 2);
  const auto prior = LabelPrior::exact({0.5, 0.5});
  const TransportCostSpec cost{1.0};
  const Theta theta = random_theta(rng, 2);
  const double eps = prior_min_radius(data, unl, prior, cost) + 0.05;
  const FeatureVector& xs = unl.points[1];
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(4, 2);
  for (std::size_t k = 0; k < 2; ++k) {
    table(1, k) = -impact_gradient_norm(theta, xs, Label::from_index(k));
  }
  const auto lp = solve_worst_case_lp(table, unl.points, data, prior, eps, cost);
  REQUIRE(lp.status == LpStatus::kOptimal);
  // Scaled by the inverse empirical mass of x_star.
  const double expected = -lp.value * 4.0;
  SolverConfig cfg = StrategyConfig::default_dr_solver();
  cfg.seed = 3;
  const double got = score_dr(xs, data, unl, prior, eps, cost, theta, cfg);
  CHECK(got == doctest::Approx(expected).epsilon(1e-3).scale(1.0));
}

TEST_CASE("active loop records one point per labeled-set size and is deterministic") {
  const auto table = synthetic_two_gaussian(60, 2, 3.0, 4);
  const auto full = to_labeled(table);
  ActiveState s;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (i < 6) {
      s.labeled.samples.push_back(full.samples[i]);
    } else {
      s.pool.push_back(full.samples[i].x);
      s.pool_labels.push_back(full.samples[i].y);
    }
  }
  for (auto kind : {StrategyKind::kRandom, StrategyKind::kEmc, StrategyKind::kMaxMc}) {
    StrategyConfig cfg;
    cfg.kind = kind;
    cfg.seed = 9;
    const auto a = run_active_loop(s, cfg, full, 16);
    const auto b = run_active_loop(s, cfg, full, 16);
    REQUIRE(a.size() == 11);
    CHECK(a.front().n_labeled == 6);
    CHECK(a.back().n_labeled == 16);
    for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t].likelihood == b[t].likelihood);
  }
  StrategyConfig cfg;
  CHECK_THROWS(run_active_loop(s, cfg, full, 6));
}

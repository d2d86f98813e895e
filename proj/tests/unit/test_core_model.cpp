#include "doctest.h"
#include "test_support.hpp"

#include "wdru/core_model.hpp"
#include "wdru/errors.hpp"

#include <cmath>

using namespace wdru;
using wdru::testing::fv;
using wdru::testing::vec;

TEST_CASE("label views convert between encodings") {
  CHECK(Label::positive().loss_view() == 1);
  CHECK(Label::negative().loss_view() == 0);
  CHECK(Label::positive().cost_view() == 1);
  CHECK(Label::negative().cost_view() == -1);
  CHECK(Label::from_cost_view(-1) == Label::negative());
  CHECK(Label::from_loss_view(1) == Label::positive());
  CHECK(Label::positive().flipped() == Label::negative());
  CHECK_THROWS(Label::from_loss_view(2));
  CHECK_THROWS(Label::from_cost_view(0));
}

TEST_CASE("logistic predictions and losses") {
  const Theta theta = vec({1.0, 0.0});
  const FeatureVector x = vec({1.0, 1.0});
  CHECK(logistic_predict(theta, x) == doctest::Approx(0.7310585786).epsilon(1e-10));
  CHECK(logistic_loss(theta, x, Label::positive()) == doctest::Approx(0.3132616875).epsilon(1e-10));
  CHECK(logistic_loss(theta, x, Label::negative()) == doctest::Approx(1.3132616875).epsilon(1e-10));
  // Zero weights give log 2 for either label.
  const Theta zero = Theta::Zero(2);
  CHECK(logistic_loss(zero, x, Label::positive()) == doctest::Approx(std::log(2.0)));
  CHECK(confidence(zero, x) == 0.5);
}

TEST_CASE("losses stay finite and nonnegative at extreme margins") {
  const FeatureVector x = vec({1.0});
  for (double t : {-800.0, -40.0, 0.0, 40.0, 800.0}) {
    const Theta theta = vec({t});
    for (Label y : {Label::negative(), Label::positive()}) {
      const double l = logistic_loss(theta, x, y);
      CHECK(std::isfinite(l));
      CHECK(l >= 0.0);
    }
  }
  CHECK(logistic_loss(vec({800.0}), x, Label::negative()) == doctest::Approx(800.0));
  CHECK(softplus(-800.0) >= 0.0);
}

TEST_CASE("loss gradient matches central differences") {
  CounterRng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const Theta theta = wdru::testing::random_theta(rng, 3);
    const FeatureVector x = wdru::testing::random_point(rng, 3);
    const Label y = Label::from_index(rng.index(2));
    const Eigen::VectorXd g = loss_grad_theta(theta, x, y);
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Theta a = theta, b = theta;
      a(j) += 1e-6;
      b(j) -= 1e-6;
      const double fd = (logistic_loss(a, x, y) - logistic_loss(b, x, y)) / 2e-6;
      CHECK(g(j) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("transport cost adds kappa per label flip") {
  const TransportCostSpec cost{2.5};
  const FeatureVector a = fv({0.0, 0.0});
  const FeatureVector b = fv({3.0, 4.0});
  CHECK(transport_cost(a, Label::positive(), b, Label::positive(), cost) == doctest::Approx(5.0));
  CHECK(transport_cost(a, Label::positive(), b, Label::negative(), cost) == doctest::Approx(7.5));
  CHECK(transport_cost(a, Label::negative(), a, Label::positive(), cost) == doctest::Approx(2.5));
  CHECK(transport_cost(a, Label::negative(), a, Label::negative(), cost) == 0.0);
}

TEST_CASE("dimension mismatches are rejected") {
  CHECK_THROWS_AS(logistic_loss(vec({1.0, 2.0}), vec({1.0}), Label::positive()), DimensionError);
  CHECK_THROWS_AS(transport_cost(vec({1.0}), Label::positive(), vec({1.0, 2.0}), Label::positive(), {}),
                  DimensionError);
  LabeledDataset ragged{{{vec({1.0}), Label::positive()}, {vec({1.0, 2.0}), Label::negative()}}};
  CHECK_THROWS(validate(ragged));
  CHECK_THROWS(validate(LabeledDataset{}));
  CHECK_THROWS(validate(UnlabeledDataset{}));
}

TEST_CASE("median and likelihood summaries") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS(median({}));
  LabeledDataset d{{{vec({1.0}), Label::positive()}, {vec({-1.0}), Label::negative()}}};
  CHECK(mean_likelihood(Theta::Zero(1), d) == doctest::Approx(0.5));
  const Theta theta = vec({1.0});
  CHECK(mean_likelihood(theta, d) == doctest::Approx(0.7310585786).epsilon(1e-10));
  CHECK(median_confidence(theta, {vec({1.0}), vec({-1.0}), vec({0.0})}) == doctest::Approx(0.7310585786));
}

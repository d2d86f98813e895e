#pragma once

#include "wdru/core_model.hpp"
#include "wdru/rng.hpp"

#include <initializer_list>

namespace wdru::testing {

inline FeatureVector fv(std::initializer_list<double> raw) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(raw.size()));
  Eigen::Index j = 0;
  for (double v : raw) x(j++) = v;
  return with_bias(x);
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index j = 0;
  for (double e : v) x(j++) = e;
  return x;
}

inline FeatureVector random_point(CounterRng& rng, std::size_t dim) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
  for (auto& v : x) v = 2.0 * rng.uniform() - 1.0;
  return with_bias(x);
}

inline LabeledDataset random_labeled(CounterRng& rng, std::size_t n, std::size_t dim) {
  LabeledDataset d;
  for (std::size_t i = 0; i < n; ++i) d.samples.push_back({random_point(rng, dim), Label::from_index(rng.index(2))});
  return d;
}

inline UnlabeledDataset random_unlabeled(CounterRng& rng, std::size_t n, std::size_t dim) {
  UnlabeledDataset u;
  for (std::size_t j = 0; j < n; ++j) u.points.push_back(random_point(rng, dim));
  return u;
}

inline Theta random_theta(CounterRng& rng, std::size_t dim) {
  Theta t(static_cast<Eigen::Index>(dim + 1));
  for (auto& v : t) v = rng.normal();
  return t;
}

}  // namespace wdru::testing

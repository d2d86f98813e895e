#include "wdru/core_model.hpp"

#include <algorithm>
#include <cmath>

namespace wdru {

Label Label::from_loss_view(int y) {
  if (y != 0 && y != 1) throw std::invalid_argument("loss-view label must be 0 or 1");
  return Label(y);
}

Label Label::from_cost_view(int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("cost-view label must be +1 or -1");
  return Label(s == 1 ? 1 : 0);
}

FeatureVector with_bias(const Eigen::VectorXd& raw) {
  FeatureVector x(raw.size() + 1);
  x.head(raw.size()) = raw;
  x(raw.size()) = 1.0;
  return x;
}

void check_dims(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

void validate(const LabeledDataset& data) {
  if (data.samples.empty()) throw std::invalid_argument("labeled dataset is empty");
  const auto d = data.samples.front().x.size();
  for (const auto& s : data.samples) check_dims(s.x.size(), d, "labeled dataset");
}

void validate(const UnlabeledDataset& data) {
  if (data.points.empty()) throw std::invalid_argument("unlabeled dataset is empty");
  const auto d = data.points.front().size();
  for (const auto& p : data.points) check_dims(p.size(), d, "unlabeled dataset");
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  if (t > 0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double logistic_predict(const Theta& theta, const FeatureVector& x) {
  check_dims(theta.size(), x.size(), "logistic_predict");
  return sigmoid(theta.dot(x));
}

double logistic_loss(const Theta& theta, const FeatureVector& x, Label y) {
  check_dims(theta.size(), x.size(), "logistic_loss");
  const double t = theta.dot(x);
  // -log sigmoid(t) = softplus(-t); -log(1 - sigmoid(t)) = softplus(t)
  return y.loss_view() == 1 ? softplus(-t) : softplus(t);
}

Eigen::VectorXd loss_grad_theta(const Theta& theta, const FeatureVector& x, Label y) {
  check_dims(theta.size(), x.size(), "loss_grad_theta");
  return (sigmoid(theta.dot(x)) - y.loss_view()) * x;
}

double transport_cost(const FeatureVector& x, Label y, const FeatureVector& x2, Label y2,
                      const TransportCostSpec& spec) {
  check_dims(x.size(), x2.size(), "transport_cost");
  const double label_part = 0.5 * spec.kappa * std::abs(y.cost_view() - y2.cost_view());
  return (x - x2).norm() + label_part;
}

double transport_cost(const LabeledSample& z, const LabeledSample& z2,
                      const TransportCostSpec& spec) {
  return transport_cost(z.x, z.y, z2.x, z2.y, spec);
}

double confidence(const Theta& theta, const FeatureVector& x) {
  const double p = logistic_predict(theta, x);
  return std::max(p, 1.0 - p);
}

double mean_likelihood(const Theta& theta, const LabeledDataset& data) {
  validate(data);
  double total = 0.0;
  for (const auto& s : data.samples) total += logistic_loss(theta, s.x, s.y);
  return std::exp(-total / static_cast<double>(data.size()));
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  const auto n = values.size();
  std::sort(values.begin(), values.end());
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double median_confidence(const Theta& theta, const std::vector<FeatureVector>& points) {
  std::vector<double> conf;
  conf.reserve(points.size());
  for (const auto& x : points) conf.push_back(confidence(theta, x));
  return median(std::move(conf));
}

}  // namespace wdru

#pragma once

#include "wdru/errors.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wdru {

/// Feature vector with the constant bias coordinate appended last.
using FeatureVector = Eigen::VectorXd;
/// Logistic-regression weights; the last entry multiplies the bias feature.
using Theta = Eigen::VectorXd;

/// Number of classes. The dual formulas are written for a general label set,
/// but every model in this library is binary.
inline constexpr std::size_t kNumLabels = 2;

/// Binary label with two fixed numeric views:
///   loss view  y in {0, 1}   (used by the logistic loss)
///   cost view  s in {-1, +1} (used by the transport cost)
/// The class index k used by the dual variables equals the loss view.
class Label {
 public:
  constexpr Label() = default;

  static constexpr Label positive() { return Label(1); }
  static constexpr Label negative() { return Label(0); }
  static constexpr Label from_index(std::size_t k) { return Label(k == 1 ? 1 : 0); }
  static Label from_loss_view(int y);
  static Label from_cost_view(int s);

  constexpr int loss_view() const { return y_; }
  constexpr int cost_view() const { return y_ == 1 ? 1 : -1; }
  constexpr std::size_t index() const { return static_cast<std::size_t>(y_); }
  constexpr Label flipped() const { return Label(1 - y_); }

  friend constexpr bool operator==(Label a, Label b) { return a.y_ == b.y_; }

 private:
  constexpr explicit Label(int y) : y_(y) {}
  int y_ = 0;
};

/// Ground cost c((x,y),(x',y')) = ||x - x'||_2 + (kappa/2)|s - s'|.
struct TransportCostSpec {
  double kappa = 1.0;
};

struct LabeledSample {
  FeatureVector x;
  Label y;
};

/// Uniformly weighted labeled sample set (the empirical measure on Z).
struct LabeledDataset {
  std::vector<LabeledSample> samples;

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return samples.empty() ? 0 : samples.front().x.size(); }
};

/// Uniformly weighted unlabeled feature set (the empirical X-marginal).
struct UnlabeledDataset {
  std::vector<FeatureVector> points;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

/// Appends the bias coordinate to raw features.
FeatureVector with_bias(const Eigen::VectorXd& raw);

/// Throws DimensionError when the two sizes differ.
void check_dims(Eigen::Index a, Eigen::Index b, const char* what);

/// Throws when a dataset is empty or has inconsistent dimensions.
void validate(const LabeledDataset& data);
void validate(const UnlabeledDataset& data);

/// Numerically stable logistic sigmoid.
double sigmoid(double t);
/// log(1 + exp(t)) without overflow.
double softplus(double t);

/// P(y = 1 | x) under the linear logistic model.
double logistic_predict(const Theta& theta, const FeatureVector& x);

/// Negative log-likelihood of `y` at `x`. Always >= 0.
double logistic_loss(const Theta& theta, const FeatureVector& x, Label y);

/// Gradient of logistic_loss in theta: (sigmoid(<theta,x>) - y) x.
Eigen::VectorXd loss_grad_theta(const Theta& theta, const FeatureVector& x, Label y);

/// Same cost as the (x, y) overload, for unpacked arguments.
double transport_cost(const FeatureVector& x, Label y, const FeatureVector& x2, Label y2,
                      const TransportCostSpec& spec);
double transport_cost(const LabeledSample& z, const LabeledSample& z2,
                      const TransportCostSpec& spec);

/// max{h(x), 1 - h(x)}; 0.5 for an indecisive predictor.
double confidence(const Theta& theta, const FeatureVector& x);

/// Geometric-mean per-sample likelihood exp(-mean loss) over a labeled set.
double mean_likelihood(const Theta& theta, const LabeledDataset& data);

/// Median of confidence over a set of points.
double median_confidence(const Theta& theta, const std::vector<FeatureVector>& points);

double median(std::vector<double> values);

}  // namespace wdru

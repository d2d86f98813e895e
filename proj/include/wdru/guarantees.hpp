#pragma once

#include "wdru/core_model.hpp"
#include "wdru/dual_solver.hpp"
#include "wdru/label_prior.hpp"

#include <span>
#include <vector>

namespace wdru {

struct PerformanceBound {
  /// Dual objective evaluated on the unlabeled sample.
  double neg_log_bound = 0.0;
  /// Finite-sample correction added before converting to likelihood.
  double correction = 0.0;
  /// exp(-(neg_log_bound + correction)) clamped to (0, 1].
  double likelihood_bound = 0.0;
  std::size_t n_unlabeled = 0;

  /// A bound no better than the indecisive predictor's 0.5.
  bool vacuous() const { return likelihood_bound <= 0.5; }
};

/// z * sample_std(phi) / sqrt(n). Zero when z == 0.
double berry_esseen_correction(std::span<const double> phi_values, double z_score);

/// Expected-loss guarantee of a dual state, in loss and likelihood space.
PerformanceBound performance_bound(const DualState& state, const LabeledDataset& data,
                                   const UnlabeledDataset& unlabeled, const LabelPrior& prior,
                                   double eps, const TransportCostSpec& cost, double z_score);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Exact binomial confidence interval for a success probability.
Interval clopper_pearson(std::size_t successes, std::size_t n, double level);

/// Strong prior: exact class probabilities. Weak prior: per-class
/// Clopper-Pearson intervals at `level` from the labeled counts.
struct PriorSpec {
  enum class Mode { kStrong, kWeak } mode = Mode::kStrong;
  std::vector<double> probabilities;  // strong mode, indexed by Label::index()
  double level = 0.95;                // weak mode

  static PriorSpec strong(std::vector<double> probs) { return {Mode::kStrong, std::move(probs), 0.95}; }
  static PriorSpec weak(double level) { return {Mode::kWeak, {}, level}; }
};

LabelPrior make_prior(const LabeledDataset& data, const PriorSpec& spec);

/// Class frequencies of a labeled set, indexed by Label::index().
std::vector<double> label_frequencies(const LabeledDataset& data);

enum class RadiusPolicy { kFixed, kAsRobustAsPossible, kMinRadiusPlusDelta, kFractionOfTrueDistance };

struct RadiusSelection {
  /// Used directly by the fixed policy.
  double eps = 0.0;
  RadiusPolicy policy = RadiusPolicy::kMinRadiusPlusDelta;
  double confidence_threshold = 0.7;
  double delta_margin = 1e-3;
  /// fraction-of-true-distance: multiple of W(labeled, full data).
  double fraction = 1.0;
  /// as-robust-as-possible: geometric grid of excess radii in [delta, span].
  std::size_t grid_points = 20;
  double grid_span = 10.0;
};

struct RadiusContext {
  const LabeledDataset& data;
  const UnlabeledDataset& unlabeled;
  const LabelPrior& prior;
  TransportCostSpec cost;
  SolverConfig solver;
  /// Full-data empirical distribution; required by fraction-of-true-distance.
  const LabeledDataset* full = nullptr;
};

struct RadiusChoice {
  double eps = 0.0;
  double eps0 = 0.0;
  /// Set when no grid radius met the confidence threshold.
  bool warning = false;
};

/// Minimal radius for the prior; for an interval (weak) prior this is the
/// larger of the radii at the two endpoint-instantiated exact priors.
double prior_min_radius(const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                        const LabelPrior& prior, const TransportCostSpec& cost);

struct RadiusSweepPoint {
  double eps = 0.0;
  double median_confidence = 0.0;
};

/// Trains at every grid radius of the as-robust-as-possible policy.
std::vector<RadiusSweepPoint> radius_confidence_sweep(const RadiusSelection& policy,
                                                      const RadiusContext& ctx, double eps0);

/// Largest swept radius whose median confidence meets the threshold.
RadiusChoice pick_most_robust(const std::vector<RadiusSweepPoint>& sweep, double threshold,
                              double eps0);

RadiusChoice select_radius(const RadiusSelection& policy, const RadiusContext& ctx);

}  // namespace wdru

#pragma once

#include "wdru/core_model.hpp"
#include "wdru/dual_solver.hpp"
#include "wdru/label_prior.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wdru {

/// L2-regularized logistic regression: mean loss + gamma ||theta||^2, solved
/// by damped Newton to gradient norm <= 1e-6. Throws NumericalError when the
/// iteration cap is reached first.
Theta erm_train_l2(const LabeledDataset& data, double ridge_gamma);

/// ||grad_theta loss(theta; x, y)|| = ||x|| |sigmoid(<theta, x>) - y|.
double impact_gradient_norm(const Theta& theta, const FeatureVector& x, Label y);

/// 2 ||x|| / ((1 + e^-t)(1 + e^t)) with t = <theta, x>.
double score_emc(const Theta& theta, const FeatureVector& x);

/// min / max of the two predicted label probabilities; multiplied by ||x||
/// when include_norm is set.
double score_min_mc(const Theta& theta, const FeatureVector& x, bool include_norm = false);
double score_max_mc(const Theta& theta, const FeatureVector& x, bool include_norm = false);

/// Robust lower bound on the impact of labeling x_star: the infimum over the
/// decision set of the expected impact restricted to x_star, scaled by the
/// inverse empirical mass of x_star. Solved through the dual with theta fixed.
/// Throws InfeasibleError when the decision set is empty.
double score_dr(const FeatureVector& x_star, const LabeledDataset& data,
                const UnlabeledDataset& unlabeled, const LabelPrior& prior, double eps,
                const TransportCostSpec& cost, const Theta& theta, const SolverConfig& config);

enum class StrategyKind { kRandom, kEmc, kMinMc, kMaxMc, kDrStrong, kDrWeak };

const char* to_string(StrategyKind kind);
/// Accepts random, emc, min_mc, max_mc, dr_strong, dr_weak.
StrategyKind parse_strategy(const std::string& name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kRandom;
  std::size_t candidate_subsample = 100;
  double ridge_gamma = 1e-3;
  double delta_margin = 1e-3;
  std::uint64_t seed = 0;
  bool mc_include_norm = false;
  /// dr_strong: true class probabilities indexed by Label::index().
  std::vector<double> true_probabilities;
  /// dr_weak: confidence level of the per-class intervals.
  double weak_level = 0.95;
  TransportCostSpec cost;
  /// Inner solver for the robust scores; radius_eps is set per step.
  SolverConfig solver = default_dr_solver();

  static SolverConfig default_dr_solver();
};

void validate(const StrategyConfig& config);

struct CurvePoint {
  std::size_t n_labeled = 0;
  double likelihood = 0.0;
};

struct ActiveState {
  LabeledDataset labeled;
  /// Unlabeled pool with its hidden labels (same order).
  std::vector<FeatureVector> pool;
  std::vector<Label> pool_labels;
  Theta theta;
  std::vector<CurvePoint> history;
  /// Interval prior fixed from the initial labeled set (dr_weak).
  LabelPrior weak_prior;
  /// Number of selections made so far; keys the per-step random streams.
  std::uint64_t step = 0;
};

/// Index into state.pool of the next point to label. Argmax ties go to the
/// lowest index; the robust strategies score a random candidate subsample.
std::size_t select_next(const ActiveState& state, const StrategyConfig& strategy);

/// Trains, records the evaluation likelihood, selects and labels until
/// stop_at labeled points; returns one curve point per labeled-set size.
std::vector<CurvePoint> run_active_loop(ActiveState initial, const StrategyConfig& strategy,
                                        const LabeledDataset& eval, std::size_t stop_at);

/// 100 x trapezoidal area under the curve divided by its n range.
double aulc(const std::vector<CurvePoint>& curve);

}  // namespace wdru

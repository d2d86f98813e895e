#include "wdru/guarantees.hpp"

#include "wdru/primal_oracle.hpp"

#include <boost/math/distributions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wdru {

double berry_esseen_correction(std::span<const double> phi, double z_score) {
  if (z_score == 0.0) return 0.0;
  const std::size_t n = phi.size();
  if (n < 2) throw std::invalid_argument("correction needs at least two unlabeled points");
  const double mean = std::accumulate(phi.begin(), phi.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : phi) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return z_score * sd / std::sqrt(static_cast<double>(n));
}

PerformanceBound performance_bound(const DualState& state, const LabeledDataset& data,
                                   const UnlabeledDataset& unlabeled, const LabelPrior& prior,
                                   double eps, const TransportCostSpec& cost, double z_score) {
  if (unlabeled.points.empty()) throw std::invalid_argument("performance bound needs unlabeled data");
  validate(state, data.size());
  const std::vector<double> phi = phi_values(state, data, unlabeled, cost);
  PerformanceBound b;
  b.n_unlabeled = phi.size();
  // Mean shifted by the first value, so a constant phi averages to itself exactly.
  double shifted = 0.0;
  for (double v : phi) shifted += v - phi.front();
  b.neg_log_bound = dual_linear_terms(state, prior, eps) + (phi.front() + shifted / static_cast<double>(phi.size()));
  b.correction = berry_esseen_correction(phi, z_score);
  b.likelihood_bound = std::min(1.0, std::exp(-(b.neg_log_bound + b.correction)));
  b.likelihood_bound = std::max(b.likelihood_bound, std::numeric_limits<double>::min());
  return b;
}

Interval clopper_pearson(std::size_t k, std::size_t n, double level) {
  if (n == 0 || k > n) throw std::invalid_argument("clopper_pearson needs 0 <= k <= n, n >= 1");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(n);
  Interval out;
  if (k > 0) out.lower = boost::math::quantile(boost::math::beta_distribution<>(kd, nd - kd + 1.0), tail);
  if (k < n) out.upper = boost::math::quantile(boost::math::beta_distribution<>(kd + 1.0, nd - kd), 1.0 - tail);
  return out;
}

std::vector<double> label_frequencies(const LabeledDataset& data) {
  validate(data);
  std::vector<double> freq(kNumLabels, 0.0);
  for (const auto& s : data.samples) freq[s.y.index()] += 1.0;
  for (double& f : freq) f /= static_cast<double>(data.size());
  return freq;
}

LabelPrior make_prior(const LabeledDataset& data, const PriorSpec& spec) {
  if (spec.mode == PriorSpec::Mode::kStrong) {
    if (spec.probabilities.size() != kNumLabels) throw std::invalid_argument("strong prior needs one probability per label");
    const double total = std::accumulate(spec.probabilities.begin(), spec.probabilities.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("strong prior probabilities must sum to 1");
    LabelPrior p = LabelPrior::exact(spec.probabilities);
    validate(p);
    return p;
  }
  validate(data);
  std::vector<std::size_t> counts(kNumLabels, 0);
  for (const auto& s : data.samples) ++counts[s.y.index()];
  LabelPrior p;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const Interval iv = clopper_pearson(counts[k], data.size(), spec.level);
    p.lower.push_back(iv.lower);
    p.upper.push_back(iv.upper);
  }
  return p;
}

namespace {

// The dense LP is exact but its tableau grows with support x labeled x labels.
double min_radius(const LabeledDataset& data, const UnlabeledDataset& unlabeled, const LabelPrior& prior,
                  const TransportCostSpec& cost) {
  if (unlabeled.size() * data.size() * kNumLabels <= 4000) {
    return min_feasible_radius(data, unlabeled.points, prior, cost);
  }
  return min_feasible_radius_flow(data, unlabeled.points, prior, cost);
}

}  // namespace

double prior_min_radius(const LabeledDataset& data, const UnlabeledDataset& unlabeled,
                        const LabelPrior& prior, const TransportCostSpec& cost) {
  validate(prior);
  bool exact = true;
  for (std::size_t k = 0; k < prior.num_labels(); ++k) exact &= prior.lower[k] == prior.upper[k];
  if (exact) return min_radius(data, unlabeled, prior, cost);
  // Instantiate the positive-class probability at each end of its interval.
  const double lo = std::max(prior.lower[1], 1.0 - prior.upper[0]);
  const double hi = std::min(prior.upper[1], 1.0 - prior.lower[0]);
  const double e_lo = min_radius(data, unlabeled, LabelPrior::exact({1.0 - lo, lo}), cost);
  const double e_hi = min_radius(data, unlabeled, LabelPrior::exact({1.0 - hi, hi}), cost);
  return std::max(e_lo, e_hi);
}

std::vector<RadiusSweepPoint> radius_confidence_sweep(const RadiusSelection& policy,
                                                      const RadiusContext& ctx, double eps0) {
  if (policy.grid_points < 1 || !(policy.delta_margin > 0.0) || !(policy.grid_span > policy.delta_margin)) {
    throw std::invalid_argument("radius grid needs points >= 1 and 0 < delta < span");
  }
  std::vector<RadiusSweepPoint> sweep;
  const double ratio = policy.grid_span / policy.delta_margin;
  for (std::size_t g = 0; g < policy.grid_points; ++g) {
    const double frac = policy.grid_points == 1 ? 0.0
                                                : static_cast<double>(g) / static_cast<double>(policy.grid_points - 1);
    const double eps = eps0 + policy.delta_margin * std::pow(ratio, frac);
    SolverConfig cfg = ctx.solver;
    cfg.radius_eps = eps;
    const Theta theta = train_dru(ctx.data, ctx.unlabeled, ctx.prior, ctx.cost, cfg);
    sweep.push_back({eps, median_confidence(theta, ctx.unlabeled.points)});
  }
  return sweep;
}

RadiusChoice pick_most_robust(const std::vector<RadiusSweepPoint>& sweep, double threshold,
                              double eps0) {
  if (sweep.empty()) throw std::invalid_argument("empty radius sweep");
  RadiusChoice out;
  out.eps0 = eps0;
  bool found = false;
  for (const auto& p : sweep) {
    if (p.median_confidence >= threshold && (!found || p.eps > out.eps)) {
      out.eps = p.eps;
      found = true;
    }
  }
  if (!found) {
    out.eps = std::min_element(sweep.begin(), sweep.end(), [](auto& a, auto& b) { return a.eps < b.eps; })->eps;
    out.warning = true;
  }
  return out;
}

RadiusChoice select_radius(const RadiusSelection& policy, const RadiusContext& ctx) {
  RadiusChoice out;
  switch (policy.policy) {
    case RadiusPolicy::kFixed:
      if (!(policy.eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
      out.eps = policy.eps;
      return out;
    case RadiusPolicy::kMinRadiusPlusDelta:
      out.eps0 = prior_min_radius(ctx.data, ctx.unlabeled, ctx.prior, ctx.cost);
      out.eps = out.eps0 + policy.delta_margin;
      return out;
    case RadiusPolicy::kFractionOfTrueDistance: {
      if (ctx.full == nullptr) throw std::invalid_argument("fraction-of-true-distance needs the full dataset");
      const double w = discrete_wasserstein(DiscreteDistribution::empirical(ctx.data),
                                            DiscreteDistribution::empirical(*ctx.full), ctx.cost)
                           .distance;
      out.eps = policy.fraction * w;
      return out;
    }
    case RadiusPolicy::kAsRobustAsPossible: {
      const double eps0 = prior_min_radius(ctx.data, ctx.unlabeled, ctx.prior, ctx.cost);
      return pick_most_robust(radius_confidence_sweep(policy, ctx, eps0), policy.confidence_threshold, eps0);
    }
  }
  throw std::invalid_argument("unknown radius policy");
}

}  // namespace wdru

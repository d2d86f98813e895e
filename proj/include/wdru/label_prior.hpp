#pragma once

#include "wdru/core_model.hpp"

#include <vector>

namespace wdru {

/// Per-class probability intervals [lower_k, upper_k], indexed by Label::index().
struct LabelPrior {
  std::vector<double> lower;
  std::vector<double> upper;

  /// Degenerate intervals at the given class probabilities.
  static LabelPrior exact(const std::vector<double>& probs);
  /// Intervals [0, 1] for every class (no label information).
  static LabelPrior uninformative(std::size_t num_labels = kNumLabels);

  std::size_t num_labels() const { return lower.size(); }
};

/// Throws InfeasibleError when no probability vector fits the intervals and
/// std::invalid_argument when an interval is malformed.
void validate(const LabelPrior& prior);

}  // namespace wdru

#include "wdru/label_prior.hpp"

#include <numeric>
#include <stdexcept>

namespace wdru {

LabelPrior LabelPrior::exact(const std::vector<double>& probs) { return {probs, probs}; }

LabelPrior LabelPrior::uninformative(std::size_t num_labels) {
  return {std::vector<double>(num_labels, 0.0), std::vector<double>(num_labels, 1.0)};
}

void validate(const LabelPrior& prior) {
  if (prior.lower.size() != prior.upper.size() || prior.lower.empty()) {
    throw std::invalid_argument("label prior bounds must be nonempty and of equal length");
  }
  for (std::size_t k = 0; k < prior.lower.size(); ++k) {
    if (!(prior.lower[k] >= 0.0 && prior.lower[k] <= prior.upper[k] && prior.upper[k] <= 1.0)) {
      throw std::invalid_argument("label prior interval " + std::to_string(k) +
                                  " is not within 0 <= lower <= upper <= 1");
    }
  }
  const double lo = std::accumulate(prior.lower.begin(), prior.lower.end(), 0.0);
  const double hi = std::accumulate(prior.upper.begin(), prior.upper.end(), 0.0);
  if (lo > 1.0 + 1e-12 || hi < 1.0 - 1e-12) {
    throw InfeasibleError("label prior admits no probability vector");
  }
}

}  // namespace wdru

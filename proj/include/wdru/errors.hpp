#pragma once

#include <stdexcept>

namespace wdru {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The decision set is empty (radius below the minimal feasible radius, or
/// label bounds that no probability vector satisfies).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method diverged or failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wdru

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

// Dense two-phase tableau simplex for the small linear programs of the
// primal oracle. Variables are implicitly nonnegative.

namespace wdru::lp {

enum class Sense { kLessEqual, kEqual, kGreaterEqual };
enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(Status s);

struct Problem {
  explicit Problem(std::size_t num_vars, bool maximize = false);

  /// Appends a constraint row and returns its index.
  std::size_t add_row(const Eigen::VectorXd& coeffs, Sense sense, double rhs);

  std::size_t num_vars() const { return static_cast<std::size_t>(objective.size()); }
  std::size_t num_rows() const { return rows.size(); }

  Eigen::VectorXd objective;
  bool maximize;
  std::vector<Eigen::VectorXd> rows;
  std::vector<Sense> senses;
  std::vector<double> rhs;
};

struct Options {
  double cost_tol = 1e-11;
  double pivot_tol = 1e-10;
  double feasibility_tol = 1e-9;
  /// Consecutive degenerate pivots before switching from Dantzig's rule to
  /// Bland's rule (which cannot cycle).
  std::size_t degenerate_switch = 50;
  std::size_t max_pivots = 1'000'000;
};

struct Solution {
  Status status = Status::kInfeasible;
  double value = 0.0;
  Eigen::VectorXd x;
  std::size_t pivots = 0;
};

Solution solve(const Problem& problem, const Options& options = {});

}  // namespace wdru::lp

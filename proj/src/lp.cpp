#include "wdru/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wdru::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

Problem::Problem(std::size_t num_vars, bool max)
    : objective(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_vars))), maximize(max) {}

std::size_t Problem::add_row(const Eigen::VectorXd& coeffs, Sense sense, double b) {
  if (coeffs.size() != objective.size()) throw std::invalid_argument("lp row has wrong width");
  rows.push_back(coeffs);
  senses.push_back(sense);
  rhs.push_back(b);
  return rows.size() - 1;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tableau {
 public:
  Tableau(const Problem& p, const Options& opt) : opt_(opt) {
    const auto m = static_cast<Eigen::Index>(p.num_rows());
    const auto n = static_cast<Eigen::Index>(p.num_vars());
    num_orig_ = n;

    std::vector<Sense> senses = p.senses;
    std::vector<double> b = p.rhs;
    std::vector<double> sign(p.num_rows(), 1.0);
    Eigen::Index num_slack = 0, num_art = 0;
    for (std::size_t r = 0; r < p.num_rows(); ++r) {
      if (b[r] < 0) {
        sign[r] = -1.0;
        b[r] = -b[r];
        if (senses[r] == Sense::kLessEqual) senses[r] = Sense::kGreaterEqual;
        else if (senses[r] == Sense::kGreaterEqual) senses[r] = Sense::kLessEqual;
      }
      if (senses[r] != Sense::kEqual) ++num_slack;
      if (senses[r] != Sense::kLessEqual) ++num_art;
    }
    first_art_ = n + num_slack;
    cols_ = first_art_ + num_art;

    t_ = RowMatrix::Zero(m, cols_);
    rhs_ = Eigen::VectorXd(m);
    basis_.assign(static_cast<std::size_t>(m), 0);
    Eigen::Index slack = n, art = first_art_;
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto ru = static_cast<std::size_t>(r);
      t_.row(r).head(n) = sign[ru] * p.rows[ru].transpose();
      rhs_(r) = b[ru];
      switch (senses[ru]) {
        case Sense::kLessEqual:
          t_(r, slack) = 1.0;
          basis_[ru] = slack++;
          break;
        case Sense::kGreaterEqual:
          t_(r, slack++) = -1.0;
          t_(r, art) = 1.0;
          basis_[ru] = art++;
          break;
        case Sense::kEqual:
          t_(r, art) = 1.0;
          basis_[ru] = art++;
          break;
      }
    }
    allowed_cols_ = cols_;
  }

  Status run_phase1() {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
    cost.tail(cols_ - first_art_).setOnes();
    const Status s = optimize(cost);
    if (s != Status::kOptimal) return s;
    if (current_objective(cost) > opt_.feasibility_tol) return Status::kInfeasible;
    drive_out_artificials();
    allowed_cols_ = first_art_;
    return Status::kOptimal;
  }

  Status run_phase2(const Eigen::VectorXd& orig_cost) {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
    cost.head(num_orig_) = orig_cost;
    return optimize(cost);
  }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(num_orig_);
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (basis_[r] < num_orig_) x(basis_[r]) = std::max(0.0, rhs_(static_cast<Eigen::Index>(r)));
    }
    return x;
  }

  std::size_t pivots() const { return pivots_; }

 private:
  double current_objective(const Eigen::VectorXd& cost) const {
    double v = 0.0;
    for (std::size_t r = 0; r < basis_.size(); ++r) v += cost(basis_[r]) * rhs_(static_cast<Eigen::Index>(r));
    return v;
  }

  Status optimize(const Eigen::VectorXd& cost) {
    // Reduced costs d = c - c_B^T B^{-1} A; the tableau rows already hold B^{-1} A.
    Eigen::VectorXd d = cost;
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      const double cb = cost(basis_[r]);
      if (cb != 0.0) d -= cb * t_.row(static_cast<Eigen::Index>(r)).transpose();
    }
    std::size_t degenerate = 0;
    while (true) {
      if (pivots_ >= opt_.max_pivots) return Status::kIterationLimit;
      const bool bland = degenerate >= opt_.degenerate_switch;
      Eigen::Index enter = -1;
      double best = -opt_.cost_tol;
      for (Eigen::Index j = 0; j < allowed_cols_; ++j) {
        if (d(j) < best) {
          enter = j;
          if (bland) break;
          best = d(j);
        }
      }
      if (enter < 0) return Status::kOptimal;

      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < t_.rows(); ++r) {
        const double a = t_(r, enter);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = rhs_(r) / a;
        const auto ru = static_cast<std::size_t>(r);
        if (leave < 0 || ratio < best_ratio - 1e-13 ||
            (ratio <= best_ratio + 1e-13 && basis_[ru] < basis_[static_cast<std::size_t>(leave)])) {
          leave = r;
          best_ratio = std::min(ratio, best_ratio);
        }
      }
      if (leave < 0) return Status::kUnbounded;

      degenerate = (rhs_(leave) <= 1e-13) ? degenerate + 1 : 0;
      pivot(leave, enter, &d);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index j, Eigen::VectorXd* d) {
    ++pivots_;
    const double inv = 1.0 / t_(r, j);
    t_.row(r) *= inv;
    rhs_(r) *= inv;
    t_(r, j) = 1.0;
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, j);
      if (f == 0.0) continue;
      t_.row(i) -= f * t_.row(r);
      rhs_(i) -= f * rhs_(r);
      t_(i, j) = 0.0;
      if (rhs_(i) < 0.0 && rhs_(i) > -1e-12) rhs_(i) = 0.0;
    }
    if (d != nullptr) {
      const double f = (*d)(j);
      if (f != 0.0) {
        *d -= f * t_.row(r).transpose();
        (*d)(j) = 0.0;
      }
    }
    basis_[static_cast<std::size_t>(r)] = j;
  }

  void drive_out_artificials() {
    for (Eigen::Index r = 0; r < t_.rows();) {
      const auto ru = static_cast<std::size_t>(r);
      if (basis_[ru] < first_art_) {
        ++r;
        continue;
      }
      Eigen::Index col = -1;
      double mag = opt_.pivot_tol;
      for (Eigen::Index j = 0; j < first_art_; ++j) {
        if (std::abs(t_(r, j)) > mag) {
          mag = std::abs(t_(r, j));
          col = j;
        }
      }
      if (col >= 0) {
        pivot(r, col, nullptr);
        ++r;
      } else {
        remove_row(r);
      }
    }
  }

  void remove_row(Eigen::Index r) {
    const Eigen::Index last = t_.rows() - 1;
    if (r != last) {
      t_.row(r) = t_.row(last);
      rhs_(r) = rhs_(last);
      basis_[static_cast<std::size_t>(r)] = basis_.back();
    }
    t_.conservativeResize(last, Eigen::NoChange);
    rhs_.conservativeResize(last);
    basis_.pop_back();
  }

  Options opt_;
  Eigen::Index num_orig_ = 0;
  Eigen::Index first_art_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::Index allowed_cols_ = 0;
  RowMatrix t_;
  Eigen::VectorXd rhs_;
  std::vector<Eigen::Index> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  Solution out;
  Tableau tab(problem, options);
  Status s = tab.run_phase1();
  if (s != Status::kOptimal) {
    out.status = s;
    out.pivots = tab.pivots();
    return out;
  }
  const Eigen::VectorXd cost = problem.maximize ? Eigen::VectorXd(-problem.objective)
                                                : problem.objective;
  s = tab.run_phase2(cost);
  out.status = s;
  out.pivots = tab.pivots();
  if (s == Status::kOptimal) {
    out.x = tab.solution();
    out.value = problem.objective.dot(out.x);
  }
  return out;
}

}  // namespace wdru::lp

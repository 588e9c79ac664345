// Dense bounded-variable revised simplex.
//
// Rows become equalities via slack columns; one signed artificial per row
// gives the phase-1 basis. Pricing and ratio ties both choose the lowest
// column index, so the path is a pure function of the input.

#include "evinsure/errors.hpp"
#include "evinsure/opt_backend.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace evinsure::opt {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kRefactorEvery = 32;

enum class Outcome { Optimal, Unbounded, IterationLimit };

class Tableau {
 public:
  Tableau(const LinearProgram& lp) : n_orig_(lp.num_vars()), m_(lp.num_rows()) {
    int slacks = 0;
    for (RowSense s : lp.senses) slacks += s == RowSense::Equal ? 0 : 1;
    n_ = n_orig_ + slacks + m_;
    a_ = Eigen::MatrixXd::Zero(m_, n_);
    for (const Entry& e : lp.entries) a_(e.row, e.col) += e.value;
    lo_.assign(static_cast<std::size_t>(n_), 0.0);
    hi_.assign(static_cast<std::size_t>(n_), kInf);
    b_ = Eigen::Map<const Eigen::VectorXd>(lp.rhs.data(), m_);
    for (int j = 0; j < n_orig_; ++j) {
      lo_[j] = lp.lower[j];
      hi_[j] = lp.upper[j];
    }
    int col = n_orig_;
    for (int i = 0; i < m_; ++i) {
      if (lp.senses[i] == RowSense::Equal) continue;
      a_(i, col) = lp.senses[i] == RowSense::LessEqual ? 1.0 : -1.0;
      ++col;
    }
    art0_ = col;

    x_.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < art0_; ++j) x_[j] = resting_value(j);
    Eigen::VectorXd r = b_;
    for (int j = 0; j < art0_; ++j) {
      if (x_[j] != 0.0) r -= a_.col(j) * x_[j];
    }
    basis_.resize(static_cast<std::size_t>(m_));
    pos_.assign(static_cast<std::size_t>(n_), -1);
    for (int i = 0; i < m_; ++i) {
      const int j = art0_ + i;
      a_(i, j) = r(i) >= 0.0 ? 1.0 : -1.0;
      x_[j] = std::abs(r(i));
      basis_[i] = j;
      pos_[j] = i;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    for (int i = 0; i < m_; ++i) binv_(i, i) = a_(i, art0_ + i);
  }

  Outcome run(const std::vector<double>& cost, double dual_tol, int max_iter, int& iterations) {
    const Eigen::Map<const Eigen::VectorXd> c(cost.data(), n_);
    int since_refactor = 0;
    while (true) {
      if (iterations >= max_iter) return Outcome::IterationLimit;
      Eigen::VectorXd cb(m_);
      for (int i = 0; i < m_; ++i) cb(i) = c(basis_[i]);
      const Eigen::VectorXd y = binv_.transpose() * cb;

      int enter = -1;
      double dir = 0.0;
      for (int j = 0; j < n_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
        const double d = c(j) - a_.col(j).dot(y);
        const bool at_lo = std::isfinite(lo_[j]) && x_[j] == lo_[j];
        const bool at_hi = std::isfinite(hi_[j]) && x_[j] == hi_[j];
        if (d < -dual_tol && !at_hi) {
          enter = j;
          dir = 1.0;
        } else if (d > dual_tol && !at_lo) {
          enter = j;
          dir = -1.0;
        }
        if (enter >= 0) break;
      }
      if (enter < 0) return Outcome::Optimal;

      const Eigen::VectorXd w = binv_ * a_.col(enter);
      double theta = hi_[enter] - lo_[enter];  // bound flip distance
      int leave_pos = -1;
      double leave_bound = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double delta = -dir * w(i);
        const int k = basis_[i];
        double limit = kInf;
        double bound = 0.0;
        if (delta < -kPivotTol && std::isfinite(lo_[k])) {
          limit = std::max(0.0, x_[k] - lo_[k]) / -delta;
          bound = lo_[k];
        } else if (delta > kPivotTol && std::isfinite(hi_[k])) {
          limit = std::max(0.0, hi_[k] - x_[k]) / delta;
          bound = hi_[k];
        } else {
          continue;
        }
        const bool better = limit < theta ||
                            (leave_pos >= 0 && limit == theta && k < basis_[leave_pos]);
        if (better) {
          theta = limit;
          leave_pos = i;
          leave_bound = bound;
        }
      }
      if (!std::isfinite(theta)) return Outcome::Unbounded;
      ++iterations;

      x_[enter] += dir * theta;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * theta * w(i);
      if (leave_pos < 0) {
        x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        continue;
      }
      const int leaving = basis_[leave_pos];
      x_[leaving] = leave_bound;
      pos_[leaving] = -1;
      basis_[leave_pos] = enter;
      pos_[enter] = leave_pos;

      if (++since_refactor >= kRefactorEvery) {
        refactor();
        since_refactor = 0;
      } else {
        const double piv = w(leave_pos);
        const Eigen::RowVectorXd prow = binv_.row(leave_pos) / piv;
        for (int i = 0; i < m_; ++i) {
          if (i != leave_pos && w(i) != 0.0) binv_.row(i) -= w(i) * prow;
        }
        binv_.row(leave_pos) = prow;
      }
    }
  }

  // Recomputes B^-1 and the basic values from the nonbasic ones.
  void refactor() {
    Eigen::MatrixXd bmat(m_, m_);
    for (int i = 0; i < m_; ++i) bmat.col(i) = a_.col(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    binv_ = lu.inverse();
    Eigen::VectorXd r = b_;
    for (int j = 0; j < n_; ++j) {
      if (pos_[j] < 0 && x_[j] != 0.0) r -= a_.col(j) * x_[j];
    }
    const Eigen::VectorXd xb = lu.solve(r);
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb(i);
  }

  Eigen::VectorXd row_duals(const std::vector<double>& cost) const {
    Eigen::MatrixXd bmat(m_, m_);
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) {
      bmat.col(i) = a_.col(basis_[i]);
      cb(i) = cost[basis_[i]];
    }
    if (m_ == 0) return Eigen::VectorXd();
    return bmat.transpose().partialPivLu().solve(cb);
  }

  void fix_artificials() {
    for (int j = art0_; j < n_; ++j) {
      lo_[j] = 0.0;
      hi_[j] = 0.0;
      if (pos_[j] < 0) x_[j] = 0.0;
    }
  }

  double artificial_sum() const {
    double s = 0.0;
    for (int j = art0_; j < n_; ++j) s += std::abs(x_[j]);
    return s;
  }

  int n() const { return n_; }
  int n_orig() const { return n_orig_; }
  int art0() const { return art0_; }
  const std::vector<double>& x() const { return x_; }

 private:
  double resting_value(int j) const {
    if (std::isfinite(lo_[j])) return lo_[j];
    if (std::isfinite(hi_[j])) return hi_[j];
    return 0.0;
  }

  int n_orig_;
  int m_;
  int n_ = 0;
  int art0_ = 0;
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> x_;
  std::vector<int> basis_;
  std::vector<int> pos_;
  Eigen::MatrixXd binv_;
};

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double t : v) m = std::max(m, std::abs(t));
  return m;
}

}  // namespace

SolveResult solve_lp(const LinearProgram& problem, const SolverOptions& options) {
  problem.validate();
  Tableau tab(problem);
  SolveResult out;
  const double b_scale = 1.0 + inf_norm(problem.rhs);
  const double c_scale = 1.0 + inf_norm(problem.cost);

  std::vector<double> phase1(static_cast<std::size_t>(tab.n()), 0.0);
  for (int j = tab.art0(); j < tab.n(); ++j) phase1[j] = 1.0;
  int iters = 0;
  Outcome o = tab.run(phase1, 1e-12, options.max_iterations, iters);
  if (o == Outcome::IterationLimit) {
    throw NumericalError("simplex phase 1 hit the iteration limit", tab.artificial_sum());
  }
  tab.refactor();
  if (tab.artificial_sum() > options.feasibility_tol * b_scale) {
    out.status = SolveStatus::Infeasible;
    out.iterations = iters;
    return out;
  }

  tab.fix_artificials();
  std::vector<double> cost(static_cast<std::size_t>(tab.n()), 0.0);
  std::copy(problem.cost.begin(), problem.cost.end(), cost.begin());
  o = tab.run(cost, 1e-11 * c_scale, options.max_iterations, iters);
  if (o == Outcome::IterationLimit) {
    throw NumericalError("simplex phase 2 hit the iteration limit", 0.0);
  }
  out.iterations = iters;
  if (o == Outcome::Unbounded) {
    out.status = SolveStatus::Unbounded;
    return out;
  }
  tab.refactor();

  out.status = SolveStatus::Optimal;
  out.primal.assign(tab.x().begin(), tab.x().begin() + tab.n_orig());
  for (int j = 0; j < tab.n_orig(); ++j) {
    // Snap tiny drift so that resting variables sit exactly on their bounds.
    double& v = out.primal[j];
    const double tol = 1e-12 * (1.0 + std::abs(v));
    if (std::isfinite(problem.lower[j]) && std::abs(v - problem.lower[j]) <= tol) v = problem.lower[j];
    if (std::isfinite(problem.upper[j]) && std::abs(v - problem.upper[j]) <= tol) v = problem.upper[j];
  }
  const Eigen::VectorXd y = tab.row_duals(cost);
  out.dual.assign(y.data(), y.data() + y.size());

  ConvexQP wrapper{problem, {}};
  evaluate_certificate(wrapper, out);
  const double scale = 1.0 + std::abs(out.objective);
  if (out.primal_residual > options.feasibility_tol * b_scale ||
      out.dual_residual > options.feasibility_tol * c_scale ||
      std::abs(out.objective - out.dual_objective) > options.gap_tol * scale) {
    throw NumericalError("simplex certificate failed: primal " +
                             std::to_string(out.primal_residual) + ", dual " +
                             std::to_string(out.dual_residual) + ", gap " +
                             std::to_string(out.objective - out.dual_objective),
                         std::max(out.primal_residual, out.dual_residual));
  }
  return out;
}

}  // namespace evinsure::opt

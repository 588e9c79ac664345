#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace evinsure::opt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct Entry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// min c'x  s.t.  rows(A x  sense  b),  lower <= x <= upper.
//
// Built incrementally; variable and row indices are returned by the adders.
class LinearProgram {
 public:
  int add_variable(double cost, double lower = 0.0, double upper = kInf);
  int add_row(const std::vector<std::pair<int, double>>& coeffs, RowSense sense, double rhs);
  void add_entry(int row, int col, double value);

  int num_vars() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  // Throws StructuralError on inconsistent dimensions or non-finite data.
  void validate() const;

  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Entry> entries;  // sparse triplets
  std::vector<RowSense> senses;
  std::vector<double> rhs;
};

// Objective sum_j quad[j] * x_j^2 + c'x with quad >= 0.
struct ConvexQP {
  LinearProgram linear;
  std::vector<double> quad;  // same length as linear.cost; empty means zero

  void set_quadratic(int var, double coeff);
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

std::string to_string(SolveStatus s);

// Dual sign convention: dual[i] = d(objective)/d(rhs[i]), reduced_cost[j] =
// gradient_j - A_j' dual. At a minimum: >= rows have dual >= 0, <= rows dual
// <= 0, a variable resting on its lower bound has reduced cost >= 0.
struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> primal;
  std::vector<double> dual;
  std::vector<double> reduced_cost;
  double objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;      // max row / bound violation
  double dual_residual = 0.0;        // max sign / stationarity violation
  double complementarity = 0.0;      // sum |dual * slack| over rows and bounds
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

struct SolverOptions {
  double feasibility_tol = 1e-9;
  double gap_tol = 1e-8;
  int max_iterations = 100000;

  // Tolerances may only be tightened.
  SolverOptions tightened(double feas, double gap) const;
};

// Bounded-variable primal simplex, lowest-index (Bland) pricing and ratio ties.
SolveResult solve_lp(const LinearProgram& problem, const SolverOptions& options = {});

// Primal-dual interior point with an active-set polish step.
SolveResult solve_qp(const ConvexQP& problem, const SolverOptions& options = {});

// Fills objective, dual objective, residuals and complementarity of `result`
// from its primal/dual vectors. Shared by both solvers and usable on
// externally supplied points.
void evaluate_certificate(const ConvexQP& problem, SolveResult& result);

}  // namespace evinsure::opt

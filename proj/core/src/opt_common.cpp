#include "evinsure/errors.hpp"
#include "evinsure/opt_backend.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evinsure::opt {

int LinearProgram::add_variable(double c, double lo, double hi) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  return num_vars() - 1;
}

int LinearProgram::add_row(const std::vector<std::pair<int, double>>& coeffs, RowSense sense,
                           double b) {
  const int row = num_rows();
  senses.push_back(sense);
  rhs.push_back(b);
  for (const auto& [col, value] : coeffs) {
    if (value != 0.0) entries.push_back({row, col, value});
  }
  return row;
}

void LinearProgram::add_entry(int row, int col, double value) {
  if (value != 0.0) entries.push_back({row, col, value});
}

void LinearProgram::validate() const {
  const auto n = cost.size();
  if (lower.size() != n || upper.size() != n) {
    throw StructuralError("LP bound vectors do not match the number of variables");
  }
  if (senses.size() != rhs.size()) {
    throw StructuralError("LP row senses do not match the number of right-hand sides");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(cost[j])) throw StructuralError("LP cost " + std::to_string(j) + " is not finite");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
        lower[j] == kInf || upper[j] == -kInf) {
      throw StructuralError("LP variable " + std::to_string(j) + " has inconsistent bounds");
    }
  }
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (!std::isfinite(rhs[i])) throw StructuralError("LP rhs " + std::to_string(i) + " is not finite");
  }
  for (const Entry& e : entries) {
    if (e.row < 0 || e.row >= num_rows() || e.col < 0 || e.col >= num_vars()) {
      throw StructuralError("LP matrix entry (" + std::to_string(e.row) + ", " +
                            std::to_string(e.col) + ") is out of range");
    }
    if (!std::isfinite(e.value)) throw StructuralError("LP matrix entry is not finite");
  }
}

void ConvexQP::set_quadratic(int var, double coeff) {
  if (quad.size() < linear.cost.size()) quad.resize(linear.cost.size(), 0.0);
  quad.at(static_cast<std::size_t>(var)) = coeff;
}

void ConvexQP::validate() const {
  linear.validate();
  if (!quad.empty() && quad.size() != linear.cost.size()) {
    throw StructuralError("QP quadratic diagonal does not match the number of variables");
  }
  for (double q : quad) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw StructuralError("QP quadratic diagonal must be >= 0");
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

SolverOptions SolverOptions::tightened(double feas, double gap) const {
  SolverOptions o = *this;
  o.feasibility_tol = std::min(feasibility_tol, feas);
  o.gap_tol = std::min(gap_tol, gap);
  return o;
}

void evaluate_certificate(const ConvexQP& problem, SolveResult& r) {
  const LinearProgram& lp = problem.linear;
  const auto n = static_cast<std::size_t>(lp.num_vars());
  const auto m = static_cast<std::size_t>(lp.num_rows());
  const auto& x = r.primal;
  const auto& y = r.dual;
  auto q = [&](std::size_t j) { return problem.quad.empty() ? 0.0 : problem.quad[j]; };

  std::vector<double> activity(m, 0.0);
  std::vector<double> grad(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) grad[j] = lp.cost[j] + 2.0 * q(j) * x[j];
  r.reduced_cost = grad;
  for (const Entry& e : lp.entries) {
    activity[static_cast<std::size_t>(e.row)] += e.value * x[static_cast<std::size_t>(e.col)];
    r.reduced_cost[static_cast<std::size_t>(e.col)] -= e.value * y[static_cast<std::size_t>(e.row)];
  }

  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += lp.cost[j] * x[j] + q(j) * x[j] * x[j];

  double pres = 0.0;
  double dres = 0.0;
  double comp = 0.0;
  double dobj = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double slack = activity[i] - lp.rhs[i];
    switch (lp.senses[i]) {
      case RowSense::LessEqual:
        pres = std::max(pres, slack);
        dres = std::max(dres, y[i]);
        break;
      case RowSense::GreaterEqual:
        pres = std::max(pres, -slack);
        dres = std::max(dres, -y[i]);
        break;
      case RowSense::Equal:
        pres = std::max(pres, std::abs(slack));
        break;
    }
    comp += std::abs(y[i] * slack) * (lp.senses[i] == RowSense::Equal ? 0.0 : 1.0);
    dobj += y[i] * lp.rhs[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    pres = std::max({pres, lo - x[j], x[j] - hi});
    const double z = r.reduced_cost[j];
    dobj -= q(j) * x[j] * x[j];
    if (z > 0.0) {
      if (std::isfinite(lo)) {
        dobj += z * lo;
        comp += z * std::abs(x[j] - lo);
      } else {
        dres = std::max(dres, z);
      }
    } else if (z < 0.0) {
      if (std::isfinite(hi)) {
        dobj += z * hi;
        comp += -z * std::abs(hi - x[j]);
      } else {
        dres = std::max(dres, -z);
      }
    }
  }
  r.objective = obj;
  r.dual_objective = dobj;
  r.primal_residual = std::max(0.0, pres);
  r.dual_residual = dres;
  r.complementarity = comp;
}

}  // namespace evinsure::opt

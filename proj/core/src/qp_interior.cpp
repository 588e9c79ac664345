// Mehrotra predictor-corrector interior point for diagonal convex QPs,
// followed by an active-set polish that solves the equality KKT system of
// the identified active set directly.

#include "evinsure/errors.hpp"
#include "evinsure/opt_backend.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace evinsure::opt {
namespace {

constexpr double kStepFraction = 0.995;
constexpr double kRegularization = 1e-12;
constexpr double kIpmTol = 1e-11;
constexpr int kMaxIpmIterations = 200;

double amax(const Eigen::VectorXd& v) { return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0; }

// Standard form after presolve: min 1/2 x'Hx + c'x, A x = b, lo <= x <= hi.
struct StandardForm {
  int n = 0;  // reduced variable count
  int m = 0;  // kept rows
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd h;  // diagonal of H
  std::vector<double> lo;
  std::vector<double> hi;

  std::vector<int> col_of_orig;   // original variable -> reduced column, -1 if fixed
  std::vector<int> row_of_orig;   // original row -> kept row, -1 if dropped
  std::vector<double> row_scale;  // per original row
  std::vector<double> fixed_value;
};

StandardForm build(const ConvexQP& qp, bool& trivially_infeasible) {
  const LinearProgram& lp = qp.linear;
  const int n0 = lp.num_vars();
  const int m0 = lp.num_rows();
  StandardForm sf;
  trivially_infeasible = false;

  sf.col_of_orig.assign(static_cast<std::size_t>(n0), -1);
  sf.fixed_value.assign(static_cast<std::size_t>(n0), 0.0);
  int n = 0;
  for (int j = 0; j < n0; ++j) {
    if (lp.lower[j] == lp.upper[j]) {
      sf.fixed_value[j] = lp.lower[j];
    } else {
      sf.col_of_orig[j] = n++;
    }
  }
  const int n_struct = n;
  std::vector<int> slack_col(static_cast<std::size_t>(m0), -1);
  for (int i = 0; i < m0; ++i) {
    if (lp.senses[i] != RowSense::Equal) slack_col[i] = n++;
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m0, n);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(lp.rhs.data(), m0);
  for (const Entry& e : lp.entries) {
    const int col = sf.col_of_orig[e.col];
    if (col >= 0) {
      a(e.row, col) += e.value;
    } else {
      b(e.row) -= e.value * sf.fixed_value[e.col];
    }
  }
  for (int i = 0; i < m0; ++i) {
    if (slack_col[i] >= 0) a(i, slack_col[i]) = lp.senses[i] == RowSense::LessEqual ? 1.0 : -1.0;
  }

  sf.row_of_orig.assign(static_cast<std::size_t>(m0), -1);
  sf.row_scale.assign(static_cast<std::size_t>(m0), 1.0);
  std::vector<int> kept;
  const double b_scale = 1.0 + amax(b);
  for (int i = 0; i < m0; ++i) {
    // Structural part only: a row whose only entry is its slack still
    // constrains nothing but the slack sign.
    const double row_max = amax(a.row(i).head(n_struct).transpose());
    if (row_max == 0.0) {
      const double bi = b(i);
      const bool ok = (lp.senses[i] == RowSense::Equal && std::abs(bi) <= 1e-12 * b_scale) ||
                      (lp.senses[i] == RowSense::LessEqual && bi >= -1e-12 * b_scale) ||
                      (lp.senses[i] == RowSense::GreaterEqual && bi <= 1e-12 * b_scale);
      if (!ok) trivially_infeasible = true;
      continue;
    }
    sf.row_scale[i] = 1.0 / row_max;
    sf.row_of_orig[i] = static_cast<int>(kept.size());
    kept.push_back(i);
  }

  // Slack columns of dropped rows are removed as well.
  std::vector<int> keep_col;
  for (int j = 0; j < n_struct; ++j) keep_col.push_back(j);
  for (int i : kept) {
    if (slack_col[i] >= 0) keep_col.push_back(slack_col[i]);
  }

  sf.n = static_cast<int>(keep_col.size());
  sf.m = static_cast<int>(kept.size());
  sf.a = Eigen::MatrixXd::Zero(sf.m, sf.n);
  sf.b = Eigen::VectorXd::Zero(sf.m);
  for (int r = 0; r < sf.m; ++r) {
    const int i = kept[r];
    for (int k = 0; k < sf.n; ++k) sf.a(r, k) = a(i, keep_col[k]) * sf.row_scale[i];
    sf.b(r) = b(i) * sf.row_scale[i];
  }
  sf.c = Eigen::VectorXd::Zero(sf.n);
  sf.h = Eigen::VectorXd::Zero(sf.n);
  sf.lo.assign(static_cast<std::size_t>(sf.n), 0.0);
  sf.hi.assign(static_cast<std::size_t>(sf.n), kInf);
  for (int j = 0; j < n0; ++j) {
    const int col = sf.col_of_orig[j];
    if (col < 0) continue;
    sf.c(col) = lp.cost[j];
    sf.h(col) = qp.quad.empty() ? 0.0 : 2.0 * qp.quad[j];
    sf.lo[col] = lp.lower[j];
    sf.hi[col] = lp.upper[j];
  }
  return sf;
}

struct IpmPoint {
  Eigen::VectorXd x, y, zl, zu;
};

enum class IpmOutcome { Converged, Diverged, Stalled };

IpmOutcome interior_point(const StandardForm& sf, IpmPoint& pt, int& iterations) {
  const int n = sf.n;
  const int m = sf.m;
  std::vector<bool> has_lo(static_cast<std::size_t>(n)), has_hi(static_cast<std::size_t>(n));
  int n_comp = 0;
  pt.x = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    has_lo[j] = std::isfinite(sf.lo[j]);
    has_hi[j] = std::isfinite(sf.hi[j]);
    n_comp += static_cast<int>(has_lo[j]) + static_cast<int>(has_hi[j]);
    if (has_lo[j] && has_hi[j]) {
      pt.x(j) = 0.5 * (sf.lo[j] + sf.hi[j]);
    } else if (has_lo[j]) {
      pt.x(j) = sf.lo[j] + 1.0;
    } else if (has_hi[j]) {
      pt.x(j) = sf.hi[j] - 1.0;
    }
  }
  pt.y = Eigen::VectorXd::Zero(m);
  pt.zl = Eigen::VectorXd::Zero(n);
  pt.zu = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (has_lo[j]) pt.zl(j) = 1.0;
    if (has_hi[j]) pt.zu(j) = 1.0;
  }

  const double b_scale = 1.0 + amax(sf.b);
  const double c_scale = 1.0 + amax(sf.c);
  Eigen::VectorXd sl(n), su(n);
  Eigen::MatrixXd kkt(n + m, n + m);

  for (iterations = 0; iterations < kMaxIpmIterations; ++iterations) {
    for (int j = 0; j < n; ++j) {
      sl(j) = has_lo[j] ? pt.x(j) - sf.lo[j] : 1.0;
      su(j) = has_hi[j] ? sf.hi[j] - pt.x(j) : 1.0;
    }
    const Eigen::VectorXd rd =
        sf.h.cwiseProduct(pt.x) + sf.c - sf.a.transpose() * pt.y - pt.zl + pt.zu;
    const Eigen::VectorXd rp = sf.b - sf.a * pt.x;
    double comp = 0.0;
    for (int j = 0; j < n; ++j) {
      if (has_lo[j]) comp += sl(j) * pt.zl(j);
      if (has_hi[j]) comp += su(j) * pt.zu(j);
    }
    const double mu = n_comp > 0 ? comp / n_comp : 0.0;
    const double obj = 0.5 * pt.x.dot(sf.h.cwiseProduct(pt.x)) + sf.c.dot(pt.x);
    const double rp_n = amax(rp);
    const double rd_n = amax(rd);
    if (rp_n <= kIpmTol * b_scale && rd_n <= kIpmTol * c_scale &&
        comp <= kIpmTol * (1.0 + std::abs(obj))) {
      return IpmOutcome::Converged;
    }
    const double xmax = amax(pt.x);
    const double ymax = amax(pt.y);
    if (xmax > 1e14 * b_scale || ymax > 1e14 * c_scale) return IpmOutcome::Diverged;

    Eigen::VectorXd d = sf.h;
    for (int j = 0; j < n; ++j) {
      if (has_lo[j]) d(j) += pt.zl(j) / sl(j);
      if (has_hi[j]) d(j) += pt.zu(j) / su(j);
      d(j) += kRegularization;
    }
    kkt.setZero();
    kkt.topLeftCorner(n, n).diagonal() = -d;
    kkt.topRightCorner(n, m) = sf.a.transpose();
    kkt.bottomLeftCorner(m, n) = sf.a;
    kkt.bottomRightCorner(m, m).diagonal().setConstant(kRegularization);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);

    auto direction = [&](const Eigen::VectorXd& tl, const Eigen::VectorXd& tu, Eigen::VectorXd& dx,
                         Eigen::VectorXd& dy, Eigen::VectorXd& dzl, Eigen::VectorXd& dzu) {
      Eigen::VectorXd rhs(n + m);
      for (int j = 0; j < n; ++j) {
        double v = rd(j);
        if (has_lo[j]) v -= tl(j) / sl(j);
        if (has_hi[j]) v += tu(j) / su(j);
        rhs(j) = v;
      }
      rhs.tail(m) = rp;
      Eigen::VectorXd sol = lu.solve(rhs);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd res = rhs - kkt * sol;
        sol += lu.solve(res);
      }
      dx = sol.head(n);
      dy = sol.tail(m);
      dzl = Eigen::VectorXd::Zero(n);
      dzu = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j) {
        if (has_lo[j]) dzl(j) = (tl(j) - pt.zl(j) * dx(j)) / sl(j);
        if (has_hi[j]) dzu(j) = (tu(j) + pt.zu(j) * dx(j)) / su(j);
      }
    };
    auto max_step = [&](const Eigen::VectorXd& dx, const Eigen::VectorXd& dzl,
                        const Eigen::VectorXd& dzu) {
      double a = 1.0;
      for (int j = 0; j < n; ++j) {
        if (has_lo[j]) {
          if (dx(j) < 0.0) a = std::min(a, -sl(j) / dx(j));
          if (dzl(j) < 0.0) a = std::min(a, -pt.zl(j) / dzl(j));
        }
        if (has_hi[j]) {
          if (dx(j) > 0.0) a = std::min(a, su(j) / dx(j));
          if (dzu(j) < 0.0) a = std::min(a, -pt.zu(j) / dzu(j));
        }
      }
      return a;
    };

    Eigen::VectorXd tl = Eigen::VectorXd::Zero(n), tu = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      if (has_lo[j]) tl(j) = -sl(j) * pt.zl(j);
      if (has_hi[j]) tu(j) = -su(j) * pt.zu(j);
    }
    Eigen::VectorXd dx, dy, dzl, dzu;
    direction(tl, tu, dx, dy, dzl, dzu);
    const double a_aff = max_step(dx, dzl, dzu);
    double comp_aff = 0.0;
    for (int j = 0; j < n; ++j) {
      if (has_lo[j]) comp_aff += (sl(j) + a_aff * dx(j)) * (pt.zl(j) + a_aff * dzl(j));
      if (has_hi[j]) comp_aff += (su(j) - a_aff * dx(j)) * (pt.zu(j) + a_aff * dzu(j));
    }
    const double mu_aff = n_comp > 0 ? comp_aff / n_comp : 0.0;
    const double sigma = mu > 0.0 ? std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3) : 0.0;
    for (int j = 0; j < n; ++j) {
      if (has_lo[j]) tl(j) = sigma * mu - sl(j) * pt.zl(j) - dx(j) * dzl(j);
      if (has_hi[j]) tu(j) = sigma * mu - su(j) * pt.zu(j) + dx(j) * dzu(j);
    }
    direction(tl, tu, dx, dy, dzl, dzu);
    const double step = std::min(1.0, kStepFraction * max_step(dx, dzl, dzu));
    pt.x += step * dx;
    pt.y += step * dy;
    pt.zl += step * dzl;
    pt.zu += step * dzu;
    for (int j = 0; j < n; ++j) {
      if (has_lo[j]) pt.x(j) = std::max(pt.x(j), sf.lo[j] + 1e-300);
      if (has_hi[j]) pt.x(j) = std::min(pt.x(j), sf.hi[j] - 1e-300);
    }
  }
  return IpmOutcome::Stalled;
}

// Solves the KKT equalities for the active set read off the interior point.
bool polish(const StandardForm& sf, IpmPoint& pt) {
  const int n = sf.n;
  const int m = sf.m;
  std::vector<int> free_cols;
  Eigen::VectorXd xfix = pt.x;
  std::vector<int> side(static_cast<std::size_t>(n), 0);  // -1 lower, +1 upper
  for (int j = 0; j < n; ++j) {
    const bool lo_ok = std::isfinite(sf.lo[j]);
    const bool hi_ok = std::isfinite(sf.hi[j]);
    if (lo_ok && pt.x(j) - sf.lo[j] < pt.zl(j)) {
      side[j] = -1;
      xfix(j) = sf.lo[j];
    } else if (hi_ok && sf.hi[j] - pt.x(j) < pt.zu(j)) {
      side[j] = 1;
      xfix(j) = sf.hi[j];
    } else {
      free_cols.push_back(j);
    }
  }
  const int nf = static_cast<int>(free_cols.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nf + m, nf + m);
  Eigen::VectorXd rhs(nf + m);
  Eigen::VectorXd bres = sf.b;
  for (int j = 0; j < n; ++j) {
    if (side[j] != 0) bres -= sf.a.col(j) * xfix(j);
  }
  for (int f = 0; f < nf; ++f) {
    const int j = free_cols[f];
    k(f, f) = sf.h(j);
    k.block(f, nf, 1, m) = -sf.a.col(j).transpose();
    k.block(nf, f, m, 1) = sf.a.col(j);
    rhs(f) = -sf.c(j);
  }
  rhs.tail(m) = bres;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  Eigen::VectorXd sol = lu.solve(rhs);
  const Eigen::VectorXd res0 = rhs - k * sol;
  sol += lu.solve(res0);
  const double scale = 1.0 + amax(rhs);
  if (!sol.allFinite() || amax(rhs - k * sol) > 1e-12 * scale) return false;

  Eigen::VectorXd x = xfix;
  for (int f = 0; f < nf; ++f) x(free_cols[f]) = sol(f);
  const Eigen::VectorXd y = sol.tail(m);
  for (int j = 0; j < n; ++j) {
    const double tol = 1e-10 * (1.0 + std::abs(x(j)));
    if (std::isfinite(sf.lo[j]) && x(j) < sf.lo[j] - tol) return false;
    if (std::isfinite(sf.hi[j]) && x(j) > sf.hi[j] + tol) return false;
  }
  const Eigen::VectorXd z = sf.h.cwiseProduct(x) + sf.c - sf.a.transpose() * y;
  const double zscale = 1e-10 * (1.0 + amax(sf.c) + amax(y));
  Eigen::VectorXd zl = Eigen::VectorXd::Zero(n), zu = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (side[j] == -1) {
      if (z(j) < -zscale) return false;
      zl(j) = std::max(0.0, z(j));
    } else if (side[j] == 1) {
      if (z(j) > zscale) return false;
      zu(j) = std::max(0.0, -z(j));
    }
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(sf.lo[j])) x(j) = std::max(x(j), sf.lo[j]);
    if (std::isfinite(sf.hi[j])) x(j) = std::min(x(j), sf.hi[j]);
  }
  pt.x = x;
  pt.y = y;
  pt.zl = zl;
  pt.zu = zu;
  return true;
}

SolveResult to_original(const ConvexQP& qp, const StandardForm& sf, const IpmPoint& pt) {
  const LinearProgram& lp = qp.linear;
  SolveResult out;
  out.status = SolveStatus::Optimal;
  out.primal.resize(static_cast<std::size_t>(lp.num_vars()));
  for (int j = 0; j < lp.num_vars(); ++j) {
    const int col = sf.col_of_orig[j];
    out.primal[j] = col >= 0 ? pt.x(col) : sf.fixed_value[j];
  }
  out.dual.assign(static_cast<std::size_t>(lp.num_rows()), 0.0);
  for (int i = 0; i < lp.num_rows(); ++i) {
    const int r = sf.row_of_orig[i];
    if (r >= 0) out.dual[i] = pt.y(r) * sf.row_scale[i];
  }
  evaluate_certificate(qp, out);
  return out;
}

bool certificate_ok(const ConvexQP& qp, const SolveResult& r, const SolverOptions& o) {
  double bmax = 0.0, cmax = 0.0;
  for (double v : qp.linear.rhs) bmax = std::max(bmax, std::abs(v));
  for (double v : qp.linear.cost) cmax = std::max(cmax, std::abs(v));
  for (double v : r.dual) cmax = std::max(cmax, std::abs(v) * 1e-3);
  return r.primal_residual <= o.feasibility_tol * (1.0 + bmax) &&
         r.dual_residual <= o.feasibility_tol * (1.0 + cmax) &&
         std::abs(r.objective - r.dual_objective) <= o.gap_tol * (1.0 + std::abs(r.objective));
}

}  // namespace

SolveResult solve_qp(const ConvexQP& problem, const SolverOptions& options) {
  problem.validate();
  bool trivially_infeasible = false;
  const StandardForm sf = build(problem, trivially_infeasible);
  if (trivially_infeasible) return SolveResult{};

  IpmPoint pt;
  int iters = 0;
  const IpmOutcome outcome = interior_point(sf, pt, iters);
  if (outcome != IpmOutcome::Converged) {
    // Decide between infeasible and unbounded with the simplex phase 1.
    LinearProgram feas = problem.linear;
    std::fill(feas.cost.begin(), feas.cost.end(), 0.0);
    const SolveResult f = solve_lp(feas, options);
    if (f.status == SolveStatus::Infeasible) {
      SolveResult out;
      out.iterations = iters;
      return out;
    }
    if (outcome == IpmOutcome::Diverged) {
      SolveResult out;
      out.status = SolveStatus::Unbounded;
      out.iterations = iters;
      return out;
    }
    throw NumericalError("interior point stalled after " + std::to_string(iters) + " iterations",
                         0.0);
  }

  IpmPoint polished = pt;
  SolveResult out;
  if (polish(sf, polished)) {
    out = to_original(problem, sf, polished);
    if (!certificate_ok(problem, out, options)) out = to_original(problem, sf, pt);
  } else {
    out = to_original(problem, sf, pt);
  }
  out.iterations = iters;
  if (!certificate_ok(problem, out, options)) {
    throw NumericalError("interior point certificate failed: primal " +
                             std::to_string(out.primal_residual) + ", dual " +
                             std::to_string(out.dual_residual) + ", gap " +
                             std::to_string(out.objective - out.dual_objective),
                         std::max(out.primal_residual, out.dual_residual));
  }
  return out;
}

}  // namespace evinsure::opt

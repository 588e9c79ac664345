#include "evinsure/errors.hpp"
#include "evinsure/opt_backend.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace evinsure;
using namespace evinsure::opt;

namespace {

struct DenseLp {
  Eigen::MatrixXd a;
  Eigen::VectorXd b, c;
};

// Random bounded LP: min c'x, A x <= b, x >= 0, with a box row keeping it bounded.
DenseLp random_lp(oracle::Gen& g, int m, int n) {
  DenseLp p;
  p.a.resize(m + 1, n);
  p.b.resize(m + 1);
  p.c.resize(n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) p.a(i, j) = g.uniform(-1.0, 2.0);
    p.b(i) = g.uniform(-1.0, 5.0);
  }
  p.a.row(m).setOnes();
  p.b(m) = 10.0;
  for (int j = 0; j < n; ++j) p.c(j) = g.uniform(-3.0, 3.0);
  return p;
}

LinearProgram to_program(const DenseLp& d) {
  LinearProgram lp;
  for (int j = 0; j < d.c.size(); ++j) lp.add_variable(d.c(j));
  for (int i = 0; i < d.a.rows(); ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < d.a.cols(); ++j) row.emplace_back(j, d.a(i, j));
    lp.add_row(row, RowSense::LessEqual, d.b(i));
  }
  return lp;
}

}  // namespace

TEST(Simplex, MatchesVertexEnumeration) {
  oracle::Gen g(101);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const DenseLp d = random_lp(g, g.integer(1, 4), g.integer(1, 4));
    const oracle::VertexResult ref = oracle::lp_vertex_enumeration(d.a, d.b, d.c);
    const SolveResult r = solve_lp(to_program(d));
    if (!std::isfinite(ref.objective)) {
      EXPECT_EQ(r.status, SolveStatus::Infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_TRUE(r.optimal()) << "trial " << trial;
    EXPECT_NEAR(r.objective, ref.objective, 1e-8 * (1.0 + std::abs(ref.objective))) << "trial " << trial;
    EXPECT_NEAR(r.objective, r.dual_objective, 1e-8 * (1.0 + std::abs(r.objective)));
    EXPECT_LE(r.primal_residual, 1e-9);
    EXPECT_LE(r.dual_residual, 1e-9);
    EXPECT_LE(r.complementarity, 1e-8);
    ++feasible;
  }
  EXPECT_GT(feasible, 50);
  EXPECT_GT(infeasible, 0);
}

TEST(Simplex, DualSignAndSensitivity) {
  // min x + 2y  s.t. x + y >= 3, x <= 2.
  LinearProgram lp;
  const int x = lp.add_variable(1.0), y = lp.add_variable(2.0);
  const int r0 = lp.add_row({{x, 1.0}, {y, 1.0}}, RowSense::GreaterEqual, 3.0);
  const int r1 = lp.add_row({{x, 1.0}}, RowSense::LessEqual, 2.0);
  const SolveResult r = solve_lp(lp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.primal[x], 2.0, 1e-12);
  EXPECT_NEAR(r.primal[y], 1.0, 1e-12);
  EXPECT_NEAR(r.dual[r0], 2.0, 1e-12);   // raising the floor costs y's price
  EXPECT_NEAR(r.dual[r1], -1.0, 1e-12);  // relaxing the cap saves 1 per unit
  EXPECT_NEAR(r.objective, 4.0, 1e-12);
}

TEST(Simplex, UnboundedAndInfeasible) {
  LinearProgram u;
  const int x = u.add_variable(-1.0);
  u.add_row({{x, 1.0}}, RowSense::GreaterEqual, 1.0);
  EXPECT_EQ(solve_lp(u).status, SolveStatus::Unbounded);

  LinearProgram inf;
  const int y = inf.add_variable(1.0);
  inf.add_row({{y, 1.0}}, RowSense::GreaterEqual, 2.0);
  inf.add_row({{y, 1.0}}, RowSense::LessEqual, 1.0);
  EXPECT_EQ(solve_lp(inf).status, SolveStatus::Infeasible);
}

TEST(Simplex, EqualityRowsFreeAndFixedVariables) {
  // min |x - 3| written with a free variable and an equality pin.
  LinearProgram lp;
  const int x = lp.add_variable(0.0, -kInf, kInf);
  const int p = lp.add_variable(1.0), n = lp.add_variable(1.0);
  const int fixed = lp.add_variable(0.0, 3.0, 3.0);
  lp.add_row({{x, 1.0}, {p, -1.0}, {n, 1.0}, {fixed, -1.0}}, RowSense::Equal, 0.0);
  lp.add_row({{x, 1.0}}, RowSense::GreaterEqual, 5.0);
  const SolveResult r = solve_lp(lp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
  EXPECT_NEAR(r.primal[fixed], 3.0, 0.0);
}

TEST(Simplex, StructuralValidation) {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.add_row({{3, 1.0}}, RowSense::LessEqual, 1.0);
  EXPECT_THROW(solve_lp(lp), StructuralError);
  LinearProgram bad;
  bad.add_variable(1.0, 2.0, 1.0);
  EXPECT_THROW(solve_lp(bad), StructuralError);
}

TEST(Simplex, DegenerateCycleProneInstance) {
  // Beale's example cycles under textbook Dantzig pricing.
  LinearProgram lp;
  const int x1 = lp.add_variable(-0.75), x2 = lp.add_variable(150.0), x3 = lp.add_variable(-0.02),
            x4 = lp.add_variable(6.0);
  lp.add_row({{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, RowSense::LessEqual, 0.0);
  lp.add_row({{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, RowSense::LessEqual, 0.0);
  lp.add_row({{x3, 1.0}}, RowSense::LessEqual, 1.0);
  const SolveResult r = solve_lp(lp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.objective, -0.05, 1e-12);
}

TEST(InteriorPoint, MatchesActiveSetEnumeration) {
  oracle::Gen g(77);
  int solved = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = g.integer(1, 4), m = g.integer(1, 5);
    Eigen::VectorXd q(n), c(n);
    for (int j = 0; j < n; ++j) {
      q(j) = g.uniform(0.1, 3.0);
      c(j) = g.uniform(-4.0, 4.0);
    }
    Eigen::MatrixXd gm(m, n);
    Eigen::VectorXd h(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) gm(i, j) = g.uniform(-2.0, 2.0);
      h(i) = g.uniform(-1.0, 3.0);
    }
    const oracle::VertexResult ref = oracle::qp_active_set_enumeration(q, c, gm, h);
    ConvexQP qp;
    for (int j = 0; j < n; ++j) qp.linear.add_variable(c(j), -kInf, kInf);
    for (int j = 0; j < n; ++j) qp.set_quadratic(j, q(j));
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.emplace_back(j, gm(i, j));
      qp.linear.add_row(row, RowSense::LessEqual, h(i));
    }
    const SolveResult r = solve_qp(qp);
    if (!std::isfinite(ref.objective)) {
      EXPECT_EQ(r.status, SolveStatus::Infeasible) << "trial " << trial;
      continue;
    }
    ASSERT_TRUE(r.optimal()) << "trial " << trial;
    EXPECT_NEAR(r.objective, ref.objective, 1e-7 * (1.0 + std::abs(ref.objective))) << "trial " << trial;
    for (int j = 0; j < n; ++j) EXPECT_NEAR(r.primal[j], ref.x(j), 1e-6) << "trial " << trial;
    EXPECT_NEAR(r.objective, r.dual_objective, 1e-7 * (1.0 + std::abs(r.objective)));
    ++solved;
  }
  EXPECT_GT(solved, 40);
}

TEST(InteriorPoint, KnownMultipliers) {
  // min x^2 s.t. x >= 1: x = 1, dual 2.
  ConvexQP qp;
  const int x = qp.linear.add_variable(0.0, -kInf, kInf);
  qp.set_quadratic(x, 1.0);
  const int row = qp.linear.add_row({{x, 1.0}}, RowSense::GreaterEqual, 1.0);
  const SolveResult r = solve_qp(qp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.primal[x], 1.0, 1e-10);
  EXPECT_NEAR(r.dual[row], 2.0, 1e-9);
}

TEST(InteriorPoint, PureLpAndUnboundedDetection) {
  ConvexQP lp;
  const int x = lp.linear.add_variable(1.0);
  lp.linear.add_row({{x, 1.0}}, RowSense::GreaterEqual, 3.0);
  const SolveResult r = solve_qp(lp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.primal[x], 3.0, 1e-9);

  ConvexQP u;
  const int y = u.linear.add_variable(-1.0);
  u.linear.add_row({{y, 1.0}}, RowSense::GreaterEqual, 0.0);
  EXPECT_EQ(solve_qp(u).status, SolveStatus::Unbounded);
}

TEST(Certificate, DetectsPerturbedDuals) {
  LinearProgram lp;
  const int x = lp.add_variable(1.0);
  lp.add_row({{x, 1.0}}, RowSense::GreaterEqual, 2.0);
  ConvexQP qp;
  qp.linear = lp;
  SolveResult r = solve_lp(lp);
  ASSERT_TRUE(r.optimal());
  r.dual[0] = -0.5;  // wrong sign for a >= row
  evaluate_certificate(qp, r);
  EXPECT_GT(r.dual_residual, 0.1);
}

TEST(SolverOptions, OnlyTighten) {
  const SolverOptions o;
  const SolverOptions t = o.tightened(1e-3, 1e-12);
  EXPECT_EQ(t.feasibility_tol, o.feasibility_tol);
  EXPECT_EQ(t.gap_tol, 1e-12);
}

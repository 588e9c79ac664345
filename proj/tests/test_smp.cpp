#include "evinsure/errors.hpp"
#include "evinsure/smp_attack.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace evinsure;
using namespace evinsure::smp;

namespace {

SmpModel published_laws() { return io::load_smp(support::fixture("smp_weibull.json")); }

Vector5 published_sojourn() { return (Vector5() << 9.1016, 13.3431, 11.7754, 11.3659, 19.8271).finished(); }
Vector5 published_probability() { return (Vector5() << 0.2010, 0.2943, 0.2366, 0.2283, 0.03980).finished(); }

}  // namespace

TEST(Weibull, MeanMatchesLanczosGamma) {
  oracle::Gen g(11);
  for (int i = 0; i < 50; ++i) {
    const double b = g.uniform(0.4, 4.0), a = g.uniform(1.0, 500.0);
    const WeibullDist w = WeibullDist::make(b, a);
    EXPECT_NEAR(w.mean(), a * oracle::lanczos_gamma(1.0 + 1.0 / b), 1e-10 * w.mean());
  }
}

TEST(Weibull, CdfQuantileRoundTrip) {
  const WeibullDist w = WeibullDist::make(1.7, 12.0);
  for (double p : {1e-9, 0.01, 0.3, 0.5, 0.9, 0.999999}) EXPECT_NEAR(weibull_cdf(w.quantile(p), w), p, 1e-12);
  EXPECT_EQ(weibull_cdf(0.0, w), 0.0);
  EXPECT_THROW(weibull_cdf(-1.0, w), DomainError);
}

TEST(Weibull, RejectsNonPositiveParameters) {
  EXPECT_THROW(WeibullDist::make(0.0, 1.0), DomainError);
  EXPECT_THROW(WeibullDist::make(1.0, -2.0), DomainError);
}

TEST(CompetingTransition, MatchesSimpsonOracle) {
  oracle::Gen g(5);
  for (int i = 0; i < 20; ++i) {
    const WeibullDist w = WeibullDist::make(g.uniform(0.6, 3.0), g.uniform(5.0, 50.0));
    const WeibullDist o = WeibullDist::make(g.uniform(0.6, 3.0), g.uniform(5.0, 400.0));
    const double ref = oracle::competing_probability({w.shape, w.scale}, {o.shape, o.scale});
    EXPECT_NEAR(competing_transition_prob(w, o).value, ref, 1e-8);
  }
}

TEST(CompetingTransition, ExponentialClosedForm) {
  // Shape 1: P = rate_w / (rate_w + rate_o).
  const WeibullDist w = WeibullDist::make(1.0, 4.0), o = WeibullDist::make(1.0, 12.0);
  EXPECT_NEAR(competing_transition_prob(w, o).value, 0.25 / (0.25 + 1.0 / 12.0), 1e-11);
}

TEST(CompetingTransition, SoleExitIsCertain) {
  EXPECT_EQ(competing_transition_prob(WeibullDist::make(2.0, 3.0), std::nullopt).value, 1.0);
}

TEST(Kernel, PublishedLawRowsAreStochastic) {
  const Matrix5 k = kernel_at_infinity(published_laws());
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(k.row(i).sum(), 1.0, 1e-9);
  EXPECT_NEAR(k(1, 2) + k(1, 4), 1.0, 1e-9);
  EXPECT_EQ(k(0, 1), 1.0);
  EXPECT_EQ(k(4, 0), 1.0);
}

TEST(Stationary, HandComputedChain) {
  Eigen::MatrixXd p(3, 3);
  p << 0.0, 1.0, 0.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0;
  const Eigen::VectorXd pi = stationary_embedded(p);
  // pi = (0.4, 0.4, 0.2) solves pi P = pi.
  EXPECT_NEAR(pi(0), 0.4, 1e-12);
  EXPECT_NEAR(pi(1), 0.4, 1e-12);
  EXPECT_NEAR(pi(2), 0.2, 1e-12);
}

TEST(Stationary, ReducibleChainRejected) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(stationary_embedded(p), StructuralError);
  Eigen::MatrixXd absorbing(2, 2);
  absorbing << 0.0, 1.0, 0.0, 1.0;
  EXPECT_THROW(stationary_embedded(absorbing), StructuralError);
}

TEST(Stationary, RandomChainsSatisfyBalance) {
  oracle::Gen g(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = g.integer(2, 7);
    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i) {
      const auto w = g.simplex(n);
      for (int j = 0; j < n; ++j) p(i, j) = w[static_cast<std::size_t>(j)];
    }
    const Eigen::VectorXd pi = stationary_embedded(p);
    EXPECT_NEAR(pi.sum(), 1.0, 1e-12);
    EXPECT_LT((p.transpose() * pi - pi).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Sojourn, IntrusionIsMeanOfTheFirstExit) {
  const SmpModel m = published_laws();
  const Vector5 t = sojourn_times(m);
  const double ref = oracle::mean_minimum({1.9293, 16.0712}, {0.7, 400.0});
  EXPECT_NEAR(t(1), ref, 1e-7 * ref);
  EXPECT_NEAR(t(0), m.at(Transition::GI).mean(), 1e-12);
}

TEST(Sojourn, IntrusionMatchesPublishedValue) {
  // Only T_I of the published column is reproduced by the transition laws.
  EXPECT_NEAR(sojourn_times(published_laws())(1), 13.3431, 5e-4);
}

TEST(AttackProbability, PublishedVectorsGiveTheCaptionValue) {
  const Vector5 t = published_sojourn();
  Vector5 p = published_probability().cwiseQuotient(t);
  p /= p.sum();
  const SmpResult r = attack_probability(p, t);
  EXPECT_NEAR(r.p_attack, 0.03980, 1e-4);
  EXPECT_NEAR(r.steady_state.sum(), 1.0, 1e-12);
}

TEST(AttackProbability, RatioPropertyHoldsExactly) {
  oracle::Gen g(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vector5 p, t;
    for (int i = 0; i < 5; ++i) {
      p(i) = g.uniform(0.01, 1.0);
      t(i) = g.uniform(0.5, 40.0);
    }
    p /= p.sum();
    const SmpResult r = attack_probability(p, t);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double lhs = r.steady_state(i) / r.steady_state(j);
        const double rhs = p(i) * t(i) / (p(j) * t(j));
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::abs(rhs));
      }
    }
  }
}

TEST(AttackProbability, PublishedTableRatiosWithinHalfPercent) {
  const Vector5 t = published_sojourn(), pr = published_probability();
  EXPECT_NEAR((pr(2) / pr(3)) / (t(2) / t(3)), 1.0, 0.005);
  EXPECT_NEAR((pr(0) / pr(1)) / (t(0) / t(1)), 1.0, 0.005);
}

TEST(AttackProbability, InputValidation) {
  Vector5 p = Vector5::Constant(0.2), t = Vector5::Constant(1.0);
  t(2) = -1.0;
  EXPECT_THROW(attack_probability(p, t), DomainError);
}

TEST(Analyze, PublishedLawPipeline) {
  const SmpAnalysis a = analyze(published_laws());
  EXPECT_NEAR(a.chain.kernel_inf(1, 2) + a.chain.kernel_inf(1, 4), 1.0, 1e-6);
  EXPECT_GT(a.result.p_attack, 0.0);
  EXPECT_LT(a.result.p_attack, 1.0);
  EXPECT_NEAR(a.result.steady_state.sum(), 1.0, 1e-12);
}

TEST(ConfidenceBox, RelativeBoxEndpoints) {
  const ConfidenceBox b = relative_box(0.0398, 0.10);
  EXPECT_NEAR(b.lower, 0.03582, 1e-12);
  EXPECT_NEAR(b.upper, 0.04378, 1e-12);
  EXPECT_THROW(relative_box(0.04, 1.5), DomainError);
}

TEST(ConfidenceBox, StudentTHalfWidth) {
  for (int n : {2, 3, 5, 10, 30}) {
    const ConfidenceBox b = confidence_box(0.04, 0.01, n, 0.05);
    const double t = oracle::t_quantile(0.975, n - 1.0);
    EXPECT_NEAR(b.half_width(), t * 0.01 / std::sqrt(n), 1e-6 * b.half_width()) << "n = " << n;
  }
}

TEST(ConfidenceBox, LowerEndClampedAtZero) {
  const ConfidenceBox b = confidence_box(0.01, 0.5, 2, 0.05);
  EXPECT_EQ(b.lower, 0.0);
  EXPECT_THROW(confidence_box(0.01, 0.1, 1, 0.05), DomainError);
}

TEST(StudentT, QuantileAgainstOracle) {
  for (double nu : {1.0, 2.0, 4.0, 9.0, 29.0}) {
    for (double p : {0.9, 0.95, 0.975, 0.995}) {
      EXPECT_NEAR(student_t_quantile(p, nu), oracle::t_quantile(p, nu), 1e-6) << nu << " " << p;
    }
  }
}

TEST(FitWeibull, RecoversParametersFromSimulation) {
  std::mt19937_64 rng(2024);
  for (const auto& [b, a] : {std::pair{2.0675, 18.8178}, std::pair{0.7, 400.0}, std::pair{1.3816, 15.7033}}) {
    std::weibull_distribution<double> draw(b, a);
    std::vector<double> s(20000);
    for (double& x : s) x = draw(rng);
    const WeibullDist fit = fit_weibull(s);
    EXPECT_NEAR(fit.shape, b, 0.03 * b);
    EXPECT_NEAR(fit.scale, a, 0.03 * a);
    // The fit is a stationary point of the log-likelihood.
    const double ll = weibull_log_likelihood(s, fit);
    EXPECT_GE(ll, weibull_log_likelihood(s, WeibullDist::make(fit.shape * 1.01, fit.scale)));
    EXPECT_GE(ll, weibull_log_likelihood(s, WeibullDist::make(fit.shape, fit.scale * 0.99)));
  }
}

TEST(FitWeibull, NeedsDistinctPositiveSamples) {
  const std::vector<double> few{1.0, 1.0, 1.0};
  EXPECT_THROW(fit_weibull(few), DomainError);
  const std::vector<double> negative{1.0, -2.0, 3.0};
  EXPECT_THROW(fit_weibull(negative), DomainError);
}

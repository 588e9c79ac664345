#include "evinsure/smp_attack.hpp"

#include "evinsure/errors.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace evinsure::smp {

namespace {

constexpr double kTailMass = 1e-9;

using TanhSinh = boost::math::quadrature::tanh_sinh<double>;

TanhSinh& integrator() {
  static TanhSinh q;
  return q;
}

// t such that the law has survival `surv` left, exact for survival near 0.
double time_at_survival(const WeibullDist& law, double surv) {
  return law.scale * std::pow(-std::log(surv), 1.0 / law.shape);
}

}  // namespace

std::string_view state_name(State s) {
  static constexpr std::array<std::string_view, kNumStates> names = {"G", "I", "D", "C", "F"};
  return names[static_cast<std::size_t>(s)];
}

WeibullDist WeibullDist::make(double shape, double scale) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("Weibull shape must be positive, got " + std::to_string(shape));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("Weibull scale must be positive, got " + std::to_string(scale));
  }
  return WeibullDist{shape, scale};
}

double WeibullDist::survival(double t) const {
  if (t <= 0.0) return 1.0;
  return std::exp(-std::pow(t / scale, shape));
}

double WeibullDist::density(double t) const {
  if (t < 0.0) return 0.0;
  if (t == 0.0) {
    if (shape < 1.0) return std::numeric_limits<double>::infinity();
    return shape == 1.0 ? 1.0 / scale : 0.0;
  }
  const double z = t / scale;
  return shape / scale * std::pow(z, shape - 1.0) * std::exp(-std::pow(z, shape));
}

double WeibullDist::mean() const { return scale * std::tgamma(1.0 + 1.0 / shape); }

double WeibullDist::quantile(double prob) const {
  return scale * std::pow(-std::log1p(-prob), 1.0 / shape);
}

double weibull_cdf(double t, const WeibullDist& dist) {
  if (t < 0.0 || std::isnan(t)) {
    throw DomainError("Weibull CDF needs t >= 0, got " + std::to_string(t));
  }
  return -std::expm1(-std::pow(t / dist.scale, dist.shape));
}

std::string_view transition_key(Transition tr) {
  static constexpr std::array<std::string_view, kNumTransitions> keys = {"GI", "ID", "IF",
                                                                         "DC", "CG", "FG"};
  return keys[static_cast<std::size_t>(tr)];
}

std::optional<Transition> transition_from_key(std::string_view key) {
  for (std::size_t k = 0; k < kNumTransitions; ++k) {
    const auto tr = static_cast<Transition>(k);
    if (transition_key(tr) == key) return tr;
  }
  return std::nullopt;
}

SmpModel::SmpModel(const std::array<WeibullDist, kNumTransitions>& transitions)
    : transitions_(transitions) {
  for (const auto& d : transitions_) WeibullDist::make(d.shape, d.scale);
}

QuadratureResult competing_transition_prob(const WeibullDist& winner,
                                           const std::optional<WeibullDist>& survivor) {
  if (!survivor) return {1.0, 0.0};
  const WeibullDist& other = *survivor;
  // Substituting u = H_winner(t) turns dH_winner into du and removes the
  // t^(shape-1) singularity of the winner's density.
  auto integrand = [&](double u, double u_complement) {
    const double t = u < 0.5 ? winner.quantile(u) : time_at_survival(winner, u_complement);
    return other.survival(t);
  };
  QuadratureResult r;
  double l1 = 0.0;
  std::size_t levels = 0;
  r.value = integrator().integrate(integrand, 0.0, 1.0, 1e-12, &r.error_estimate, &l1, &levels);
  if (!(r.error_estimate <= kQuadratureTolerance)) {
    throw NumericalError("competing-transition quadrature did not converge (error estimate " +
                             std::to_string(r.error_estimate) + ")",
                         r.error_estimate);
  }
  return r;
}

namespace {

struct IntrusionExit {
  QuadratureResult k_id;
  QuadratureResult k_if;
};

IntrusionExit intrusion_exit(const SmpModel& model) {
  return {competing_transition_prob(model.at(Transition::ID), model.at(Transition::IF)),
          competing_transition_prob(model.at(Transition::IF), model.at(Transition::ID))};
}

Matrix5 assemble_kernel(const IntrusionExit& exit) {
  Matrix5 k = Matrix5::Zero();
  using S = State;
  auto idx = [](S s) { return static_cast<Eigen::Index>(s); };
  k(idx(S::G), idx(S::I)) = 1.0;
  k(idx(S::I), idx(S::D)) = exit.k_id.value;
  k(idx(S::I), idx(S::F)) = exit.k_if.value;
  k(idx(S::D), idx(S::C)) = 1.0;
  k(idx(S::C), idx(S::G)) = 1.0;
  k(idx(S::F), idx(S::G)) = 1.0;
  return k;
}

// Boolean reachability closure, small n.
std::vector<std::vector<bool>> reachability(const Eigen::MatrixXd& p) {
  const auto n = static_cast<std::size_t>(p.rows());
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    r[i][i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) r[i][j] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

}  // namespace

Matrix5 kernel_at_infinity(const SmpModel& model) { return assemble_kernel(intrusion_exit(model)); }

Eigen::VectorXd stationary_embedded(const Eigen::MatrixXd& kernel) {
  const Eigen::Index n = kernel.rows();
  if (n == 0 || kernel.cols() != n) {
    throw StructuralError("embedded-chain kernel must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((kernel.row(i).array() < 0.0).any()) {
      throw StructuralError("embedded-chain kernel has a negative entry in row " +
                            std::to_string(i));
    }
    const double s = kernel.row(i).sum();
    if (std::abs(s - 1.0) > 1e-9) {
      throw StructuralError("embedded-chain kernel row " + std::to_string(i) + " sums to " +
                            std::to_string(s));
    }
  }

  // A unique stationary law needs exactly one closed communicating class.
  const auto reach = reachability(kernel);
  const auto un = static_cast<std::size_t>(n);
  std::vector<int> closed_class(un, -1);
  int num_closed = 0;
  for (std::size_t i = 0; i < un; ++i) {
    bool recurrent = true;
    for (std::size_t j = 0; j < un && recurrent; ++j) {
      if (reach[i][j] && !reach[j][i]) recurrent = false;
    }
    if (!recurrent || closed_class[i] >= 0) continue;
    for (std::size_t j = 0; j < un; ++j) {
      if (reach[i][j] && reach[j][i]) closed_class[j] = num_closed;
    }
    ++num_closed;
  }
  if (num_closed != 1) {
    throw StructuralError("embedded chain is reducible: " + std::to_string(num_closed) +
                          " closed classes");
  }
  if (n > 1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (kernel(i, i) == 1.0) {
        throw StructuralError("embedded chain has absorbing state " + std::to_string(i));
      }
    }
  }

  // (P^T - I) p = 0 with the last balance equation replaced by sum(p) = 1.
  Eigen::MatrixXd a = kernel.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd p = lu.solve(rhs);
  p += lu.solve(rhs - a * p);  // one refinement step

  for (Eigen::Index i = 0; i < n; ++i) {
    if (p(i) < 0.0) p(i) = 0.0;
  }
  p /= p.sum();
  const double residual = (kernel.transpose() * p - p).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw NumericalError("stationary solve residual " + std::to_string(residual), residual);
  }
  return p;
}

namespace {

QuadratureResult intrusion_sojourn(const SmpModel& model) {
  const WeibullDist& id = model.at(Transition::ID);
  const WeibullDist& itf = model.at(Transition::IF);
  // The first-exit time is stochastically below both laws, so the faster
  // law's horizon already bounds the neglected tail.
  const double t_max = std::max(id.quantile(1.0 - kTailMass), itf.quantile(1.0 - kTailMass));
  auto integrand = [&](double t) { return id.survival(t) * itf.survival(t); };
  QuadratureResult r;
  double l1 = 0.0;
  std::size_t levels = 0;
  r.value = integrator().integrate(integrand, 0.0, t_max, 1e-12, &r.error_estimate, &l1, &levels);
  // Tail: int_{t_max}^inf S_id S_if <= int_{t_max}^inf S_id <= S_id(t_max) E[T_id].
  const double tail = id.survival(t_max) * id.mean();
  r.error_estimate += tail;
  return r;
}

}  // namespace

Vector5 sojourn_times(const SmpModel& model) {
  Vector5 t;
  t(static_cast<Eigen::Index>(State::G)) = model.at(Transition::GI).mean();
  const QuadratureResult ti = intrusion_sojourn(model);
  if (!(ti.error_estimate <= 1e-7 * std::max(1.0, ti.value))) {
    throw NumericalError("intrusion sojourn quadrature did not converge", ti.error_estimate);
  }
  t(static_cast<Eigen::Index>(State::I)) = ti.value;
  t(static_cast<Eigen::Index>(State::D)) = model.at(Transition::DC).mean();
  t(static_cast<Eigen::Index>(State::C)) = model.at(Transition::CG).mean();
  t(static_cast<Eigen::Index>(State::F)) = model.at(Transition::FG).mean();
  return t;
}

SmpResult attack_probability(const Vector5& stationary, const Vector5& sojourn) {
  if ((sojourn.array() < 0.0).any() || (stationary.array() < 0.0).any()) {
    throw DomainError("stationary and sojourn vectors must be nonnegative");
  }
  const double weight = stationary.dot(sojourn);
  if (!(weight > 0.0)) throw DomainError("p . T must be positive");
  SmpResult r;
  r.sojourn = sojourn;
  r.steady_state = stationary.cwiseProduct(sojourn) / weight;
  r.p_attack = r.steady_state(static_cast<Eigen::Index>(State::F));
  return r;
}

SmpAnalysis analyze(const SmpModel& model) {
  const IntrusionExit exit = intrusion_exit(model);
  SmpAnalysis a;
  a.chain.kernel_inf = assemble_kernel(exit);
  a.chain.stationary = stationary_embedded(a.chain.kernel_inf);
  a.result = attack_probability(a.chain.stationary, sojourn_times(model));
  a.k_id_error = exit.k_id.error_estimate;
  a.k_if_error = exit.k_if.error_estimate;
  return a;
}

double student_t_quantile(double prob, double dof) {
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("t quantile needs 0 < prob < 1");
  if (!(dof > 0.0)) throw DomainError("t quantile needs positive degrees of freedom");
  const boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, prob);
}

ConfidenceBox confidence_box(double center, double sigma, int n, double xi) {
  if (n < 2) throw DomainError("confidence box needs at least two observations");
  if (!(xi > 0.0 && xi < 1.0)) throw DomainError("confidence level xi must lie in (0, 1)");
  if (!(sigma >= 0.0)) throw DomainError("sigma must be nonnegative");
  const double half =
      student_t_quantile(1.0 - xi / 2.0, static_cast<double>(n - 1)) * sigma / std::sqrt(n);
  ConfidenceBox box;
  box.center = center;
  box.lower = std::max(0.0, center - half);
  box.upper = center + half;
  box.level = xi;
  box.n_obs = n;
  box.sigma = sigma;
  return box;
}

ConfidenceBox relative_box(double center, double rel_eps) {
  if (!(rel_eps >= 0.0 && rel_eps < 1.0)) throw DomainError("relative epsilon must lie in [0, 1)");
  ConfidenceBox box;
  box.center = center;
  box.lower = center * (1.0 - rel_eps);
  box.upper = center * (1.0 + rel_eps);
  box.level = 0.0;
  box.n_obs = 0;
  box.sigma = 0.0;
  return box;
}

double weibull_log_likelihood(std::span<const double> samples, const WeibullDist& dist) {
  const double k = dist.shape;
  const double lam = dist.scale;
  double ll = 0.0;
  for (double x : samples) {
    const double z = x / lam;
    ll += std::log(k / lam) + (k - 1.0) * std::log(z) - std::pow(z, k);
  }
  return ll;
}

WeibullDist fit_weibull(std::span<const double> samples) {
  if (samples.size() < 3) throw DomainError("Weibull fit needs at least three samples");
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Weibull fit needs positive samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  if (distinct < 2) throw DomainError("Weibull fit is degenerate: all samples are identical");
  if (distinct < 3) throw DomainError("Weibull fit needs at least three distinct samples");

  // Work with y = x / max(x) so that y^shape never overflows.
  const double x_max = sorted.back();
  std::vector<double> log_y(samples.size());
  std::transform(samples.begin(), samples.end(), log_y.begin(),
                 [x_max](double x) { return std::log(x / x_max); });
  const double mean_log =
      std::accumulate(log_y.begin(), log_y.end(), 0.0) / static_cast<double>(log_y.size());

  // Profile score in the shape; strictly increasing.
  auto score = [&](double shape) {
    double s0 = 0.0;
    double s1 = 0.0;
    for (double ly : log_y) {
      const double w = std::exp(shape * ly);
      s0 += w;
      s1 += w * ly;
    }
    return s1 / s0 - 1.0 / shape - mean_log;
  };

  double lo = 1e-3;
  double hi = 1.0;
  while (score(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("Weibull shape root not bracketed", hi);
  }
  while (score(lo) > 0.0) {
    lo /= 2.0;
    if (lo < 1e-12) throw NumericalError("Weibull shape root not bracketed", lo);
  }
  std::uintmax_t max_iter = 200;
  const auto root = boost::math::tools::toms748_solve(
      score, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  const double shape = 0.5 * (root.first + root.second);

  double mean_pow = 0.0;
  for (double ly : log_y) mean_pow += std::exp(shape * ly);
  mean_pow /= static_cast<double>(log_y.size());
  const double scale = x_max * std::pow(mean_pow, 1.0 / shape);
  return WeibullDist::make(shape, scale);
}

}  // namespace evinsure::smp

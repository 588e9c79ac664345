#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace evinsure::smp {

// Attack life-cycle states: Good, Intrusion, Detection, Containment, Failure.
enum class State : std::size_t { G = 0, I = 1, D = 2, C = 3, F = 4 };
inline constexpr std::size_t kNumStates = 5;

std::string_view state_name(State s);

using Matrix5 = Eigen::Matrix<double, 5, 5>;
using Vector5 = Eigen::Matrix<double, 5, 1>;

// Two-parameter Weibull law, H(t) = 1 - exp(-(t/scale)^shape), t in hours.
struct WeibullDist {
  double shape = 1.0;  // beta
  double scale = 1.0;  // alpha, hours

  // Throws DomainError unless shape > 0 and scale > 0.
  static WeibullDist make(double shape, double scale);

  double survival(double t) const;
  double density(double t) const;
  double mean() const;
  // Time by which the law has put `prob` of its mass.
  double quantile(double prob) const;
};

double weibull_cdf(double t, const WeibullDist& dist);

// The six transitions of the attack chain.
enum class Transition : std::size_t { GI = 0, ID = 1, IF = 2, DC = 3, CG = 4, FG = 5 };
inline constexpr std::size_t kNumTransitions = 6;

std::string_view transition_key(Transition tr);
std::optional<Transition> transition_from_key(std::string_view key);

class SmpModel {
 public:
  explicit SmpModel(const std::array<WeibullDist, kNumTransitions>& transitions);

  const WeibullDist& at(Transition tr) const {
    return transitions_[static_cast<std::size_t>(tr)];
  }
  const std::array<WeibullDist, kNumTransitions>& transitions() const { return transitions_; }

 private:
  std::array<WeibullDist, kNumTransitions> transitions_;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

inline constexpr double kQuadratureTolerance = 1e-9;

// Probability that `winner` fires before `survivor`:
//   int_0^inf (1 - H_survivor(t)) dH_winner(t).
// Without a survivor the transition is the only exit and the result is 1.
// Throws NumericalError when the error estimate exceeds the tolerance.
QuadratureResult competing_transition_prob(const WeibullDist& winner,
                                           const std::optional<WeibullDist>& survivor);

// Embedded-chain transition matrix K(t -> inf); row = from, column = to.
Matrix5 kernel_at_infinity(const SmpModel& model);

// Solves p = p P, sum(p) = 1 for a row-stochastic P. Throws StructuralError when
// the chain has no unique stationary law (several closed classes or an
// absorbing state).
Eigen::VectorXd stationary_embedded(const Eigen::MatrixXd& kernel);

// Mean holding time in every state, hours.
Vector5 sojourn_times(const SmpModel& model);

struct EmbeddedChainResult {
  Matrix5 kernel_inf;
  Vector5 stationary;
};

struct SmpResult {
  Vector5 sojourn;       // T_s, hours
  Vector5 steady_state;  // P_s
  double p_attack = 0.0; // P_F
};

// P_s = p_s T_s / (p . T); p_attack = P_F.
SmpResult attack_probability(const Vector5& stationary, const Vector5& sojourn);

struct SmpAnalysis {
  EmbeddedChainResult chain;
  SmpResult result;
  double k_id_error = 0.0;  // quadrature error estimates
  double k_if_error = 0.0;
};

SmpAnalysis analyze(const SmpModel& model);

struct ConfidenceBox {
  double lower = 0.0;
  double upper = 0.0;
  double center = 0.0;
  double level = 0.05;  // xi
  int n_obs = 2;
  double sigma = 0.0;
  double half_width() const { return upper - center; }
};

// center -/+ t_{1-xi/2, n-1} sigma / sqrt(n). The lower end is clamped at 0.
ConfidenceBox confidence_box(double center, double sigma, int n, double xi);

// center * (1 -/+ rel_eps), the expert-elicited variant.
ConfidenceBox relative_box(double center, double rel_eps);

// Two-sided Student-t quantile t_{prob} with `dof` degrees of freedom.
double student_t_quantile(double prob, double dof);

double weibull_log_likelihood(std::span<const double> samples, const WeibullDist& dist);

// Maximum-likelihood Weibull fit. Needs at least three distinct positive samples.
WeibullDist fit_weibull(std::span<const double> samples);

}  // namespace evinsure::smp

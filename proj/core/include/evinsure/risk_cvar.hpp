#pragma once

#include "evinsure/premium_analytic.hpp"
#include "evinsure/typical_days.hpp"

#include <string>
#include <vector>

namespace evinsure::risk {

enum class BoundMode { Lower, Expected, Upper };

std::string to_string(BoundMode mode);
BoundMode bound_mode_from_string(const std::string& name);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double mid() const { return 0.5 * (lower + upper); }
  double pick(BoundMode mode) const;
};

// Box on the uncertain policy factors; the remaining factors are fixed.
struct PolicyBox {
  Interval p_attack;
  Interval loading;
  Interval history_coeff;
  double risk_share = 1.0;
  double attack_count = 0.0;
  double penalty = 0.0;  // $/kW

  static PolicyBox point(const premium::PolicyFactors& p);
  // Lower ends, midpoints or upper ends of every interval.
  premium::PolicyFactors select(BoundMode mode) const;
  void validate() const;
};

struct RiskConfig {
  double alpha = 1.0;
  PolicyBox box;
  BoundMode mode = BoundMode::Expected;

  void validate() const;
};

// sup over {q : sum q = 1, 0 <= q_s <= phi_s / alpha} of q'c, greedy fill.
double cvar_sup(const std::vector<double>& costs, const std::vector<double>& weights, double alpha);

// alpha-worst-case cost (cents) of one typical day.
double worst_case_scenario_cost(const std::vector<double>& demand_kw, const std::vector<double>& charging_price,
                                const std::vector<double>& tariff, double x_hat, double p_attack,
                                double risk_share, double penalty_usd_per_kw);

struct CvarSolution {
  std::vector<double> charging_price;  // lambda^{c,WC}, cents/kWh
  double v = 0.0;
  std::vector<double> zeta;
  double eta = 0.0;
  std::vector<double> phi;   // scenario multipliers
  std::vector<double> mu;
  std::vector<double> beta;
  double cvar = 0.0;         // achieved CVaR of the scenario costs, cents
  std::vector<double> phi_hat;
  std::vector<double> scenario_cost;  // cents
  double objective = 0.0;    // ||lambda||^2
  double alpha = 1.0;
  double x_hat = 0.0;
};

// Throws InfeasibleError when no charging price lets the EVCS break even.
CvarSolution solve_risk_averse_evcs(const TypicalDaySet& days, double x_hat, const RiskConfig& config,
                                    const Tariff& tariff);

struct KktReport {
  double primal_feasibility = 0.0;
  double dual_sign = 0.0;
  double complementarity = 0.0;
  double stationarity_lambda = 0.0;  // 2 lambda_t - M sum_s phi^s d_t^s - beta_t
  double stationarity_zeta = 0.0;    // eta phi_s - alpha phi^s - mu^s
  double stationarity_v = 0.0;       // sum phi^s - eta
  double tail_identity = 0.0;        // (1 - alpha) sum phi^s - sum mu^s
  double max() const;
};

KktReport kkt_report(const CvarSolution& sol, const TypicalDaySet& days, const RiskConfig& config,
                     const Tariff& tariff);

struct PremiumQuote {
  double premium_cents = 0.0;
  double premium_usd = 0.0;
  double per_kwh = 0.0;  // cents/kWh
  std::vector<double> charging_price;
  BoundMode mode = BoundMode::Expected;
  double alpha = 1.0;
  std::vector<double> trace;  // |x_{k+1} - x_k| per iteration, cents
  int iterations = 0;
  CvarSolution evcs;
  KktReport kkt;
  double cyber_loss_gap = 0.0;  // |x - CL|, cents
};

struct FixedPointOptions {
  double start = 0.0;  // x_0, cents
  int max_iterations = 500;
  int damping_after = 50;
  double damping = 0.5;
  double tolerance = 1e-8;
};

// CL (cents) under the original likelihoods and the bound-selected factors.
double robust_cyber_loss(const TypicalDaySet& days, const RiskConfig& config,
                         const std::vector<double>& charging_price);

// Fixed point of x -> CL(lambda^c(x)). Throws ConvergenceError with the trace.
PremiumQuote robust_premium_bilevel(const TypicalDaySet& days, const RiskConfig& config,
                                    const Tariff& tariff, const FixedPointOptions& options = {});

}  // namespace evinsure::risk

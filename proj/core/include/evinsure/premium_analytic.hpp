#pragma once

#include "evinsure/typical_days.hpp"

#include <string>
#include <vector>

namespace evinsure::premium {

// Base-rate parameters of the insurer.
struct PolicyFactors {
  double p_attack = 0.0;       // P(A)
  double loading = 0.0;        // r, in [0, 1)
  double risk_share = 1.0;     // gamma, in [0, 1]
  double history_coeff = 0.0;  // kappa >= 0
  double attack_count = 0.0;   // A_h, nonnegative integer
  double penalty = 0.0;        // rho, $/kW

  // Throws DomainError when a factor leaves its domain.
  void validate() const;
  // rho expressed as cents per kW of demand per hour.
  double penalty_cents() const;
};

// P(A) gamma (1 + kappa A_h) / (1 - r).
double composite_c(const PolicyFactors& policy);

// P(A)(gamma - 1) + 1: weight of the charging revenue in the EVCS cost.
double revenue_weight(double p_attack, double risk_share);

struct AnalyticSolution {
  double premium_usd = 0.0;
  double premium_cents = 0.0;
  double per_kwh = 0.0;                // x_hat, cents/kWh
  std::vector<double> charging_price;  // lambda^c_t, cents/kWh
  double omega = 0.0;                  // EVCS break-even multiplier
  double ul_multiplier = 0.0;          // insurer premium-bound multiplier
  double composite = 0.0;              // C
  double revenue_weight = 0.0;         // P(A)(gamma-1)+1
  double base_cost = 0.0;              // cents; cost of the EVCS before premium and revenue
};

// Throws PricingError (a DomainError) when P(A)(gamma-1)+1 <= C.
AnalyticSolution closed_form_premium(const PolicyFactors& policy, const TypicalDaySet& days,
                                     const Tariff& tariff);

// Expected EVCS cost (cents) at charging price lambda^c and premium x_hat.
double expected_evcs_cost(const PolicyFactors& policy, const TypicalDaySet& days, const Tariff& tariff,
                          const std::vector<double>& charging_price, double x_hat);

// Expected cyber loss (cents) at charging price lambda^c.
double expected_cyber_loss(const PolicyFactors& policy, const TypicalDaySet& days,
                           const std::vector<double>& charging_price);

enum class SweepAxis { AttackProbability, Loading, RiskShare, HistoryCoeff, AttackCount };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepPoint {
  double value = 0.0;
  double per_kwh = 0.0;  // NaN when the point is outside the domain
  std::string error;
};

PolicyFactors with_axis(PolicyFactors base, SweepAxis axis, double value);

std::vector<SweepPoint> sensitivity_sweep(const PolicyFactors& base, SweepAxis axis,
                                          const std::vector<double>& grid, const TypicalDaySet& days,
                                          const Tariff& tariff);

struct HomogeneityCheck {
  double base_premium = 0.0;    // cents
  double scaled_premium = 0.0;  // cents
  double scale = 1.0;
  double relative_error = 0.0;  // |scaled - scale*base| / (1 + scale*base)
};

HomogeneityCheck demand_forecast_premium_monotonicity(const PolicyFactors& policy,
                                                      const TypicalDaySet& days, const Tariff& tariff,
                                                      double scale);

}  // namespace evinsure::premium

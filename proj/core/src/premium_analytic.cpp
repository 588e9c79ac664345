#include "evinsure/premium_analytic.hpp"

#include "evinsure/errors.hpp"
#include "evinsure/units.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace evinsure::premium {

void PolicyFactors::validate() const {
  if (!(p_attack >= 0.0 && p_attack <= 1.0)) {
    throw DomainError("attack probability " + std::to_string(p_attack) + " is outside [0, 1]");
  }
  if (!(loading >= 0.0 && loading < 1.0)) {
    throw DomainError("loading factor r = " + std::to_string(loading) + " must lie in [0, 1)");
  }
  if (!(risk_share >= 0.0 && risk_share <= 1.0)) {
    throw DomainError("risk-sharing factor " + std::to_string(risk_share) + " is outside [0, 1]");
  }
  if (!(history_coeff >= 0.0) || !std::isfinite(history_coeff)) {
    throw DomainError("history coefficient must be nonnegative");
  }
  if (!(attack_count >= 0.0) || attack_count != std::floor(attack_count) || !std::isfinite(attack_count)) {
    throw DomainError("attack count must be a nonnegative integer");
  }
  if (!std::isfinite(penalty)) throw DomainError("penalty rho must be finite");
}

double PolicyFactors::penalty_cents() const { return units::usd_to_cents(penalty); }

double composite_c(const PolicyFactors& p) {
  if (!(p.loading < 1.0)) throw DomainError("loading factor r must be < 1");
  return p.p_attack * p.risk_share * (1.0 + p.history_coeff * p.attack_count) / (1.0 - p.loading);
}

double revenue_weight(double p_attack, double risk_share) { return p_attack * (risk_share - 1.0) + 1.0; }

namespace {

// sum_s phi^s sum_t d_t^s lambda^{u,s}_t, cents.
double expected_energy_cost(const TypicalDaySet& days, const Tariff& tariff) {
  double total = 0.0;
  for (int s = 0; s < days.num_days(); ++s) {
    double day = 0.0;
    for (int t = 0; t < days.num_hours(); ++t) day += days.demand_kw[s][t] * tariff.at(s, t);
    total += days.likelihood[s] * day;
  }
  return total;
}

double expected_revenue(const TypicalDaySet& days, const std::vector<double>& price) {
  if (static_cast<int>(price.size()) != days.num_hours()) {
    throw DomainError("charging price has " + std::to_string(price.size()) + " hours, expected " +
                      std::to_string(days.num_hours()));
  }
  const auto d = days.expected_demand();
  double r = 0.0;
  for (std::size_t t = 0; t < d.size(); ++t) r += d[t] * price[t];
  return r;
}

}  // namespace

AnalyticSolution closed_form_premium(const PolicyFactors& policy, const TypicalDaySet& days,
                                     const Tariff& tariff) {
  policy.validate();
  days.validate();
  tariff.check_shape(days.num_days(), days.num_hours());
  const double c = composite_c(policy);
  const double m = revenue_weight(policy.p_attack, policy.risk_share);
  if (!(m - c > 0.0)) {
    throw PricingError("premium unbounded: P(A)(gamma-1)+1 = " + std::to_string(m) +
                       " does not exceed C = " + std::to_string(c));
  }
  const auto d = days.expected_demand();
  double sum_d = 0.0, sum_d2 = 0.0;
  for (double v : d) {
    sum_d += v;
    sum_d2 += v * v;
  }
  if (!(sum_d > 0.0)) throw DomainError("expected EVCS demand is zero");

  AnalyticSolution sol;
  sol.composite = c;
  sol.revenue_weight = m;
  sol.base_cost = policy.p_attack * policy.penalty_cents() * sum_d +
                  (1.0 - policy.p_attack) * expected_energy_cost(days, tariff);
  sol.premium_cents = c * sol.base_cost / (m - c);
  sol.premium_usd = units::cents_to_usd(sol.premium_cents);
  sol.per_kwh = sol.premium_cents / sum_d;
  sol.omega = 2.0 * (sol.base_cost + sol.premium_cents) / (m * m * sum_d2);
  sol.ul_multiplier = m / (m - c);
  sol.charging_price.resize(d.size());
  for (std::size_t t = 0; t < d.size(); ++t) sol.charging_price[t] = 0.5 * sol.omega * m * d[t];
  return sol;
}

double expected_evcs_cost(const PolicyFactors& p, const TypicalDaySet& days, const Tariff& tariff,
                          const std::vector<double>& price, double x_hat) {
  const double revenue = expected_revenue(days, price);
  const double sum_d = days.total_expected_demand();
  return (1.0 - p.p_attack) * (expected_energy_cost(days, tariff) - revenue) +
         p.p_attack * (p.penalty_cents() * sum_d - p.risk_share * revenue) + x_hat * sum_d;
}

double expected_cyber_loss(const PolicyFactors& p, const TypicalDaySet& days,
                           const std::vector<double>& price) {
  return composite_c(p) * expected_revenue(days, price);
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::AttackProbability: return "p_attack";
    case SweepAxis::Loading: return "loading";
    case SweepAxis::RiskShare: return "risk_share";
    case SweepAxis::HistoryCoeff: return "history_coeff";
    case SweepAxis::AttackCount: return "attack_count";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  for (SweepAxis a : {SweepAxis::AttackProbability, SweepAxis::Loading, SweepAxis::RiskShare,
                      SweepAxis::HistoryCoeff, SweepAxis::AttackCount}) {
    if (to_string(a) == name) return a;
  }
  throw DomainError("unknown sweep axis '" + name + "'");
}

PolicyFactors with_axis(PolicyFactors base, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::AttackProbability: base.p_attack = value; break;
    case SweepAxis::Loading: base.loading = value; break;
    case SweepAxis::RiskShare: base.risk_share = value; break;
    case SweepAxis::HistoryCoeff: base.history_coeff = value; break;
    case SweepAxis::AttackCount: base.attack_count = value; break;
  }
  return base;
}

std::vector<SweepPoint> sensitivity_sweep(const PolicyFactors& base, SweepAxis axis,
                                          const std::vector<double>& grid, const TypicalDaySet& days,
                                          const Tariff& tariff) {
  std::vector<SweepPoint> out;
  for (double v : grid) {
    SweepPoint pt;
    pt.value = v;
    try {
      pt.per_kwh = closed_form_premium(with_axis(base, axis, v), days, tariff).per_kwh;
    } catch (const DomainError& e) {
      pt.per_kwh = std::numeric_limits<double>::quiet_NaN();
      pt.error = e.what();
    }
    out.push_back(pt);
  }
  return out;
}

HomogeneityCheck demand_forecast_premium_monotonicity(const PolicyFactors& policy,
                                                      const TypicalDaySet& days, const Tariff& tariff,
                                                      double scale) {
  if (!(scale > 0.0)) throw DomainError("demand scale must be positive");
  HomogeneityCheck h;
  h.scale = scale;
  h.base_premium = closed_form_premium(policy, days, tariff).premium_cents;
  h.scaled_premium = closed_form_premium(policy, days.scaled(scale), tariff).premium_cents;
  h.relative_error = std::abs(h.scaled_premium - scale * h.base_premium) / (1.0 + scale * h.base_premium);
  return h;
}

}  // namespace evinsure::premium

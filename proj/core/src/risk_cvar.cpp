#include "evinsure/risk_cvar.hpp"

#include "evinsure/errors.hpp"
#include "evinsure/opt_backend.hpp"
#include "evinsure/units.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace evinsure::risk {

using premium::PolicyFactors;

std::string to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::Lower: return "lower";
    case BoundMode::Expected: return "expected";
    case BoundMode::Upper: return "upper";
  }
  return "unknown";
}

BoundMode bound_mode_from_string(const std::string& name) {
  if (name == "lower") return BoundMode::Lower;
  if (name == "expected") return BoundMode::Expected;
  if (name == "upper") return BoundMode::Upper;
  throw DomainError("unknown bound mode '" + name + "' (expected lower, expected or upper)");
}

double Interval::pick(BoundMode mode) const {
  switch (mode) {
    case BoundMode::Lower: return lower;
    case BoundMode::Expected: return mid();
    case BoundMode::Upper: return upper;
  }
  return mid();
}

PolicyBox PolicyBox::point(const PolicyFactors& p) {
  PolicyBox b;
  b.p_attack = {p.p_attack, p.p_attack};
  b.loading = {p.loading, p.loading};
  b.history_coeff = {p.history_coeff, p.history_coeff};
  b.risk_share = p.risk_share;
  b.attack_count = p.attack_count;
  b.penalty = p.penalty;
  return b;
}

PolicyFactors PolicyBox::select(BoundMode mode) const {
  PolicyFactors p;
  p.p_attack = p_attack.pick(mode);
  p.loading = loading.pick(mode);
  p.history_coeff = history_coeff.pick(mode);
  p.risk_share = risk_share;
  p.attack_count = attack_count;
  p.penalty = penalty;
  return p;
}

void PolicyBox::validate() const {
  for (const Interval* iv : {&p_attack, &loading, &history_coeff}) {
    if (!(iv->lower <= iv->upper)) throw DomainError("policy box interval has lower > upper");
  }
  select(BoundMode::Lower).validate();
  select(BoundMode::Upper).validate();
}

void RiskConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("CVaR level alpha = " + std::to_string(alpha) + " is outside [0, 1]");
  }
  box.validate();
}

double cvar_sup(const std::vector<double>& costs, const std::vector<double>& weights, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("CVaR level alpha = " + std::to_string(alpha) + " is outside [0, 1]");
  }
  if (costs.size() != weights.size() || costs.empty()) {
    throw DomainError("CVaR needs one weight per scenario cost");
  }
  if (alpha == 0.0) return *std::max_element(costs.begin(), costs.end());
  if (alpha == 1.0) {
    double e = 0.0;
    for (std::size_t s = 0; s < costs.size(); ++s) e += weights[s] * costs[s];
    return e;
  }
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] > costs[b]; });
  double remaining = 1.0;
  double total = 0.0;
  for (std::size_t s : order) {
    const double q = std::min(weights[s] / alpha, remaining);
    total += q * costs[s];
    remaining -= q;
    if (remaining <= 0.0) break;
  }
  return total;
}

double worst_case_scenario_cost(const std::vector<double>& d, const std::vector<double>& price,
                                const std::vector<double>& tariff, double x_hat, double p_attack,
                                double risk_share, double penalty_usd_per_kw) {
  if (price.size() != d.size() || tariff.size() != d.size()) {
    throw DomainError("scenario cost needs demand, price and tariff of equal length");
  }
  const double rho = units::usd_to_cents(penalty_usd_per_kw);
  double unattacked = 0.0, attacked = 0.0, insurance = 0.0;
  for (std::size_t t = 0; t < d.size(); ++t) {
    unattacked += d[t] * (tariff[t] - price[t]);
    attacked += d[t] * (rho - risk_share * price[t]);
    insurance += x_hat * d[t];
  }
  return (1.0 - p_attack) * unattacked + p_attack * attacked + insurance;
}

namespace {

std::vector<double> scenario_costs(const TypicalDaySet& days, const std::vector<double>& price,
                                   const Tariff& tariff, double x_hat, const PolicyFactors& f) {
  std::vector<double> c;
  for (int s = 0; s < days.num_days(); ++s) {
    c.push_back(worst_case_scenario_cost(days.demand_kw[s], price, tariff.cents_per_kwh[s], x_hat,
                                         f.p_attack, f.risk_share, f.penalty));
  }
  return c;
}

}  // namespace

CvarSolution solve_risk_averse_evcs(const TypicalDaySet& days, double x_hat, const RiskConfig& config,
                                    const Tariff& tariff) {
  config.validate();
  days.validate();
  tariff.check_shape(days.num_days(), days.num_hours());
  const PolicyFactors f = config.box.select(config.mode);
  const double weight = premium::revenue_weight(f.p_attack, f.risk_share);
  const double rho = f.penalty_cents();
  const int nd = days.num_days();
  const int nh = days.num_hours();
  const double a = config.alpha;

  opt::ConvexQP qp;
  opt::LinearProgram& lp = qp.linear;
  std::vector<int> lam, zeta;
  for (int t = 0; t < nh; ++t) lam.push_back(lp.add_variable(0.0));
  const int v = lp.add_variable(0.0, -opt::kInf, opt::kInf);
  for (int s = 0; s < nd; ++s) zeta.push_back(lp.add_variable(0.0, 0.0, a == 0.0 ? 0.0 : opt::kInf));
  for (int j : lam) qp.set_quadratic(j, 1.0);
  qp.quad.resize(static_cast<std::size_t>(lp.num_vars()), 0.0);

  std::vector<std::pair<int, double>> budget{{v, 1.0}};
  for (int s = 0; s < nd; ++s) budget.emplace_back(zeta[s], days.likelihood[s]);
  const int row_eta = lp.add_row(budget, opt::RowSense::LessEqual, 0.0);
  std::vector<int> row_s;
  for (int s = 0; s < nd; ++s) {
    double fixed = 0.0;
    std::vector<std::pair<int, double>> row{{zeta[s], a}, {v, 1.0}};
    for (int t = 0; t < nh; ++t) {
      const double d = days.demand_kw[s][t];
      fixed += (1.0 - f.p_attack) * d * tariff.at(s, t) + (f.p_attack * rho + x_hat) * d;
      row.emplace_back(lam[t], weight * d);
    }
    row_s.push_back(lp.add_row(row, opt::RowSense::GreaterEqual, fixed));
  }

  const opt::SolveResult r = opt::solve_qp(qp);
  if (r.status == opt::SolveStatus::Infeasible) {
    throw InfeasibleError("EVCS cannot break even at any charging price (alpha = " +
                          std::to_string(a) + ", x_hat = " + std::to_string(x_hat) + ")");
  }
  if (!r.optimal()) throw NumericalError("risk-averse EVCS problem is " + opt::to_string(r.status), 0.0);

  CvarSolution sol;
  sol.alpha = a;
  sol.x_hat = x_hat;
  for (int j : lam) {
    sol.charging_price.push_back(r.primal[j]);
    sol.beta.push_back(r.reduced_cost[j]);
  }
  sol.v = r.primal[v];
  sol.eta = -r.dual[row_eta];
  for (int s = 0; s < nd; ++s) {
    sol.zeta.push_back(r.primal[zeta[s]]);
    sol.mu.push_back(r.reduced_cost[zeta[s]]);
    sol.phi.push_back(r.dual[row_s[s]]);
    sol.phi_hat.push_back(sol.eta > 0.0 ? sol.phi.back() / sol.eta : 0.0);
  }
  sol.objective = r.objective;
  sol.scenario_cost = scenario_costs(days, sol.charging_price, tariff, x_hat, f);
  sol.cvar = cvar_sup(sol.scenario_cost, days.likelihood, a);
  return sol;
}

double KktReport::max() const {
  return std::max({primal_feasibility, dual_sign, complementarity, stationarity_lambda, stationarity_zeta,
                   stationarity_v, tail_identity});
}

KktReport kkt_report(const CvarSolution& sol, const TypicalDaySet& days, const RiskConfig& config,
                     const Tariff& tariff) {
  const PolicyFactors f = config.box.select(config.mode);
  const double weight = premium::revenue_weight(f.p_attack, f.risk_share);
  const double a = config.alpha;
  const int nd = days.num_days();
  const int nh = days.num_hours();
  const auto cost = scenario_costs(days, sol.charging_price, tariff, sol.x_hat, f);
  double cost_scale = 1.0 + std::abs(sol.v);
  for (double c : cost) cost_scale = std::max(cost_scale, 1.0 + std::abs(c));
  double dual_scale = 1.0 + std::abs(sol.eta);
  for (double p : sol.phi) dual_scale = std::max(dual_scale, 1.0 + std::abs(p));

  KktReport k;
  double budget = sol.v;
  for (int s = 0; s < nd; ++s) budget += days.likelihood[s] * sol.zeta[s];
  k.primal_feasibility = std::max(0.0, budget) / cost_scale;
  k.complementarity = std::abs(sol.eta * budget) / (cost_scale * dual_scale);
  k.dual_sign = std::max(0.0, -sol.eta);
  double sum_phi = 0.0, sum_mu = 0.0;
  for (int s = 0; s < nd; ++s) {
    const double slack = a * sol.zeta[s] + sol.v - cost[s];
    k.primal_feasibility = std::max({k.primal_feasibility, -slack / cost_scale, -sol.zeta[s]});
    k.complementarity = std::max({k.complementarity, std::abs(sol.phi[s] * slack) / (cost_scale * dual_scale),
                                  std::abs(sol.mu[s] * sol.zeta[s]) / (cost_scale * dual_scale)});
    k.dual_sign = std::max({k.dual_sign, -sol.phi[s], -sol.mu[s]});
    k.stationarity_zeta = std::max(
        k.stationarity_zeta,
        std::abs(sol.eta * days.likelihood[s] - a * sol.phi[s] - sol.mu[s]) / dual_scale);
    sum_phi += sol.phi[s];
    sum_mu += sol.mu[s];
  }
  k.stationarity_v = std::abs(sum_phi - sol.eta) / dual_scale;
  k.tail_identity = std::abs((1.0 - a) * sum_phi - sum_mu) / dual_scale;
  double price_scale = 1.0;
  for (double p : sol.charging_price) price_scale = std::max(price_scale, 1.0 + 2.0 * std::abs(p));
  for (int t = 0; t < nh; ++t) {
    double pull = 0.0;
    for (int s = 0; s < nd; ++s) pull += sol.phi[s] * days.demand_kw[s][t];
    const double res = 2.0 * sol.charging_price[t] - weight * pull - sol.beta[t];
    k.stationarity_lambda = std::max(k.stationarity_lambda, std::abs(res) / price_scale);
    k.primal_feasibility = std::max(k.primal_feasibility, -sol.charging_price[t]);
    k.dual_sign = std::max(k.dual_sign, -sol.beta[t]);
    k.complementarity =
        std::max(k.complementarity, std::abs(sol.beta[t] * sol.charging_price[t]) / (price_scale * price_scale));
  }
  return k;
}

double robust_cyber_loss(const TypicalDaySet& days, const RiskConfig& config,
                         const std::vector<double>& price) {
  return premium::expected_cyber_loss(config.box.select(config.mode), days, price);
}

PremiumQuote robust_premium_bilevel(const TypicalDaySet& days, const RiskConfig& config,
                                    const Tariff& tariff, const FixedPointOptions& options) {
  config.validate();
  days.validate();
  const double sum_d = days.total_expected_demand();
  if (!(sum_d > 0.0)) throw DomainError("expected EVCS demand is zero");
  PremiumQuote q;
  q.mode = config.mode;
  q.alpha = config.alpha;
  double x = std::max(0.0, options.start);
  bool converged = false;
  for (int k = 0; k < options.max_iterations; ++k) {
    const CvarSolution sol = solve_risk_averse_evcs(days, x / sum_d, config, tariff);
    double next = robust_cyber_loss(days, config, sol.charging_price);
    if (k >= options.damping_after) next = x + options.damping * (next - x);
    const double step = std::abs(next - x);
    q.trace.push_back(step);
    q.iterations = k + 1;
    const double previous = x;
    x = next;
    if (!std::isfinite(x) || x > 1e300) break;
    if (step <= options.tolerance * (1.0 + previous)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("premium fixed point did not converge in " + std::to_string(q.iterations) +
                               " iterations (alpha = " + std::to_string(config.alpha) + ", " +
                               to_string(config.mode) + ")",
                           q.trace);
  }
  q.premium_cents = x;
  q.premium_usd = units::cents_to_usd(x);
  q.per_kwh = x / sum_d;
  q.evcs = solve_risk_averse_evcs(days, q.per_kwh, config, tariff);
  q.charging_price = q.evcs.charging_price;
  q.kkt = kkt_report(q.evcs, days, config, tariff);
  q.cyber_loss_gap = std::abs(x - robust_cyber_loss(days, config, q.charging_price));
  return q;
}

}  // namespace evinsure::risk

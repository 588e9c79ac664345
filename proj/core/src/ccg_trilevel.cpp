#include "evinsure/ccg_trilevel.hpp"

#include "evinsure/errors.hpp"
#include "evinsure/opt_backend.hpp"
#include "evinsure/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <tuple>

namespace evinsure::trilevel {

using risk::BoundMode;
using risk::RiskConfig;

std::string to_string(Method m) { return m == Method::Ccg ? "ccg" : "direct"; }

Method method_from_string(const std::string& name) {
  if (name == "ccg") return Method::Ccg;
  if (name == "direct") return Method::Direct;
  throw DomainError("unknown trilevel mode '" + name + "' (expected ccg or direct)");
}

namespace {

std::string day_label(const TypicalDaySet& days, int s) {
  return days.labels.empty() ? std::to_string(s + 1) : days.labels[s];
}

double max_relative_gap(const grid::TariffTable& t) {
  double g = 0.0;
  for (const auto& day : t.per_day) g = std::max(g, day.strong_duality_gap() / (1.0 + std::abs(day.c_ll)));
  return g;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

TrilevelQuote solve_trilevel_direct(const grid::Network& net, const TypicalDaySet& days,
                                    const RiskConfig& config) {
  TrilevelQuote out;
  out.method = Method::Direct;
  out.tariffs = grid::predetermined_tariff(net, days);
  out.max_strong_duality_gap = max_relative_gap(out.tariffs);
  out.quote = risk::robust_premium_bilevel(days, config, out.tariffs.evcs);
  return out;
}

TrilevelQuote ccg_solve(const grid::Network& net, const TypicalDaySet& days, const RiskConfig& config,
                        const CcgOptions& options) {
  config.validate();
  days.validate();
  TrilevelQuote out;
  out.method = Method::Ccg;
  out.tariffs = grid::predetermined_tariff(net, days);
  out.max_strong_duality_gap = max_relative_gap(out.tariffs);

  // Lower-level blocks: the EVCS-bus price is pinned to the optimal-dual face
  // of every hour's primal, dual and strong-duality constraints.
  const int nd = days.num_days();
  const int nh = days.num_hours();
  Tariff lambda_u;
  for (int s = 0; s < nd; ++s) {
    std::vector<double> row;
    for (int t = 0; t < nh; ++t) {
      const grid::HourBlock blk =
          grid::build_hour_block(net, day_label(days, s), t, units::kw_to_mw(days.demand_kw[s][t]));
      const grid::DlmpInterval iv = grid::dlmp_interval(blk, net, net.evcs_bus);
      out.dlmp_interval_width = std::max(out.dlmp_interval_width, iv.upper - iv.lower);
      row.push_back(units::usd_per_mwh_to_cents_per_kwh(iv.lower));
    }
    lambda_u.cents_per_kwh.push_back(row);
  }

  const premium::PolicyFactors f = config.box.select(config.mode);
  const double loss_factor = premium::composite_c(f);
  const double weight = premium::revenue_weight(f.p_attack, f.risk_share);
  const double rho = f.penalty_cents();
  const auto big_d = days.expected_demand();
  const double sum_d = days.total_expected_demand();
  if (!(sum_d > 0.0)) throw DomainError("expected EVCS demand is zero");

  CcgState& st = out.state;
  st.tolerance = options.tolerance;
  st.upper_bound = std::numeric_limits<double>::infinity();
  std::vector<double> floor(static_cast<std::size_t>(nh), 0.0);
  double incumbent_x = -1.0;
  std::vector<double> gaps;

  for (int k = 1; k <= options.max_iterations; ++k) {
    // Principal: UL and ML constraints with the accumulated cuts.
    opt::ConvexQP qp;
    opt::LinearProgram& lp = qp.linear;
    const int x = lp.add_variable(1.0);
    std::vector<int> lam, zeta;
    for (int t = 0; t < nh; ++t) lam.push_back(lp.add_variable(0.0, floor[t], opt::kInf));
    const int v = lp.add_variable(0.0, -opt::kInf, opt::kInf);
    for (int s = 0; s < nd; ++s) zeta.push_back(lp.add_variable(0.0, 0.0, config.alpha == 0.0 ? 0.0 : opt::kInf));
    for (int j : lam) qp.set_quadratic(j, 1.0);
    qp.quad.resize(static_cast<std::size_t>(lp.num_vars()), 0.0);

    std::vector<std::pair<int, double>> ul{{x, 1.0}};
    for (int t = 0; t < nh; ++t) ul.emplace_back(lam[t], -loss_factor * big_d[t]);
    lp.add_row(ul, opt::RowSense::GreaterEqual, 0.0);
    std::vector<std::pair<int, double>> budget{{v, 1.0}};
    for (int s = 0; s < nd; ++s) budget.emplace_back(zeta[s], days.likelihood[s]);
    lp.add_row(budget, opt::RowSense::LessEqual, 0.0);
    for (int s = 0; s < nd; ++s) {
      double fixed = 0.0, day_total = 0.0;
      std::vector<std::pair<int, double>> row{{zeta[s], config.alpha}, {v, 1.0}};
      for (int t = 0; t < nh; ++t) {
        const double d = days.demand_kw[s][t];
        fixed += (1.0 - f.p_attack) * d * lambda_u.at(s, t) + f.p_attack * rho * d;
        day_total += d;
        row.emplace_back(lam[t], weight * d);
      }
      row.emplace_back(x, -day_total / sum_d);
      lp.add_row(row, opt::RowSense::GreaterEqual, fixed);
    }
    const opt::SolveResult pr = opt::solve_qp(qp);
    if (pr.status == opt::SolveStatus::Unbounded) {
      throw StructuralError("C&CG principal problem is unbounded; premium floor and cuts do not bind");
    }
    if (!pr.optimal()) throw InfeasibleError("C&CG principal problem is " + opt::to_string(pr.status));

    CcgIteration it;
    it.k = k;
    it.lower_bound = pr.objective;
    it.principal_x = pr.primal[x];

    // Subproblem at the principal premium.
    const risk::CvarSolution sub =
        risk::solve_risk_averse_evcs(days, it.principal_x / sum_d, config, lambda_u);
    it.subproblem_norm2 = norm2(sub.charging_price);
    it.insurer_slack = it.principal_x - loss_factor * [&] {
      double r = 0.0;
      for (int t = 0; t < nh; ++t) r += big_d[t] * sub.charging_price[t];
      return r;
    }();
    if (it.insurer_slack >= -1e-9 * (1.0 + it.principal_x)) {
      const double ub = it.principal_x + it.subproblem_norm2;
      if (ub < st.upper_bound) {
        st.upper_bound = ub;
        incumbent_x = it.principal_x;
      }
    }
    st.iteration = k;
    st.lower_bound = it.lower_bound;
    st.x = it.principal_x;
    st.cuts.push_back(sub.charging_price);
    st.cut_norms.push_back(it.subproblem_norm2);
    for (int t = 0; t < nh; ++t) floor[t] = std::max(floor[t], sub.charging_price[t]);
    it.upper_bound = st.upper_bound;
    out.trace.push_back(it);

    const double gap = st.upper_bound - st.lower_bound;
    gaps.push_back(gap);
    if (std::isfinite(gap) && gap <= options.tolerance * (1.0 + std::abs(st.upper_bound))) break;
    if (k == options.max_iterations) {
      throw ConvergenceError("C&CG did not close the bound gap in " + std::to_string(k) + " iterations", gaps);
    }
  }

  risk::PremiumQuote& q = out.quote;
  q.mode = config.mode;
  q.alpha = config.alpha;
  q.premium_cents = incumbent_x;
  q.premium_usd = units::cents_to_usd(incumbent_x);
  q.per_kwh = incumbent_x / sum_d;
  q.evcs = risk::solve_risk_averse_evcs(days, q.per_kwh, config, lambda_u);
  q.charging_price = q.evcs.charging_price;
  q.kkt = risk::kkt_report(q.evcs, days, config, lambda_u);
  q.cyber_loss_gap = std::abs(incumbent_x - risk::robust_cyber_loss(days, config, q.charging_price));
  q.iterations = st.iteration;
  q.trace = gaps;
  return out;
}

std::vector<SweepRow> demand_scaling_sweep(const grid::Network& net, const TypicalDaySet& days,
                                           const risk::PolicyBox& box, const std::vector<double>& scales,
                                           const std::vector<double>& alphas,
                                           const std::vector<BoundMode>& modes, Method method) {
  std::vector<SweepRow> rows;
  for (double scale : scales) {
    const TypicalDaySet scaled = days.scaled(scale);
    grid::TariffTable tariff;
    std::string tariff_error;
    if (method == Method::Direct) {
      try {
        tariff = grid::predetermined_tariff(net, scaled);
      } catch (const Error& e) {
        tariff_error = e.what();
      }
    }
    for (double alpha : alphas) {
      for (BoundMode mode : modes) {
        SweepRow row;
        row.scale = scale;
        row.alpha = alpha;
        row.mode = mode;
        try {
          if (!tariff_error.empty()) throw InfeasibleError(tariff_error);
          RiskConfig cfg{alpha, box, mode};
          const risk::PremiumQuote q = method == Method::Direct
                                           ? risk::robust_premium_bilevel(scaled, cfg, tariff.evcs)
                                           : ccg_solve(net, scaled, cfg).quote;
          double total = 0.0;
          for (double p : q.charging_price) total += p;
          row.lambda_c_avg = total / static_cast<double>(q.charging_price.size());
          row.x_hat = q.per_kwh;
        } catch (const Error& e) {
          row.ok = false;
          row.error = e.what();
          row.lambda_c_avg = std::numeric_limits<double>::quiet_NaN();
          row.x_hat = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

SweepCheck check_sweep(const std::vector<SweepRow>& rows, double slack) {
  SweepCheck c;
  std::map<std::tuple<int, double, double>, double> cell;  // (mode, alpha, scale) -> x_hat
  for (const SweepRow& r : rows) {
    if (r.ok) cell[{static_cast<int>(r.mode), r.alpha, r.scale}] = r.x_hat;
  }
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };
  for (const auto& [key, value] : cell) {
    const auto [mode, alpha, scale] = key;
    const std::string tag = risk::to_string(static_cast<BoundMode>(mode)) + " alpha=" + fmt(alpha) +
                            " scale=" + fmt(scale);
    // Next larger scale with the same (mode, alpha).
    for (auto it = cell.upper_bound(key); it != cell.end(); ++it) {
      const auto [m2, a2, s2] = it->first;
      if (m2 != mode || a2 != alpha) break;
      if (it->second < value - slack) {
        c.scale_monotone = false;
        c.violations.push_back(tag + ": x_hat falls at scale " + fmt(s2));
      }
      break;
    }
    for (const auto& [k2, v2] : cell) {
      const auto [m2, a2, s2] = k2;
      if (m2 == mode && s2 == scale && a2 > alpha && v2 > value + slack) {
        c.alpha_monotone = false;
        c.violations.push_back(tag + ": x_hat exceeds the alpha=" + fmt(a2) + " value");
      }
    }
  }
  const int lo = static_cast<int>(BoundMode::Lower);
  const int hi = static_cast<int>(BoundMode::Upper);
  for (const auto& [key, value] : cell) {
    const auto [mode, alpha, scale] = key;
    if (mode != lo) continue;
    const auto up = cell.find({hi, alpha, scale});
    if (up == cell.end()) continue;
    const double spread = up->second - value;
    for (const auto& [k2, v2] : cell) {
      const auto [m2, a2, s2] = k2;
      if (m2 != lo || s2 != scale || !(a2 > alpha)) continue;
      const auto up2 = cell.find({hi, a2, s2});
      if (up2 == cell.end()) continue;
      if (up2->second - v2 > spread + slack) {
        c.spread_monotone = false;
        c.violations.push_back("spread at alpha=" + fmt(alpha) + " scale=" + fmt(scale) +
                               " is narrower than at alpha=" + fmt(a2));
      }
    }
  }
  return c;
}

}  // namespace evinsure::trilevel

#include "evinsure/report.hpp"

#include "evinsure/errors.hpp"
#include "evinsure/units.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

namespace evinsure::report {

namespace fs = std::filesystem;
using io::format_number;
using nlohmann::json;
using risk::BoundMode;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return format_number(v); }

std::string bus_label(int b) { return std::to_string(b); }

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

json vec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json vec5_json(const smp::Vector5& v) {
  json o;
  for (std::size_t i = 0; i < smp::kNumStates; ++i) {
    o[std::string(smp::state_name(static_cast<smp::State>(i)))] = v[static_cast<Eigen::Index>(i)];
  }
  return o;
}

smp::Vector5 vec5_from_json(const json& o, const std::string& what) {
  smp::Vector5 v;
  for (std::size_t i = 0; i < smp::kNumStates; ++i) {
    const std::string name(smp::state_name(static_cast<smp::State>(i)));
    if (!o.contains(name)) throw ParseError("reference JSON: " + what + " lacks state " + name);
    v[static_cast<Eigen::Index>(i)] = o.at(name).get<double>();
  }
  return v;
}

// Published cell for (alpha, mode, scale) in one of the reference tables.
std::optional<double> reference_cell(const json& table, double alpha, BoundMode mode, double scale) {
  if (table.is_null()) return std::nullopt;
  const std::string key = "alpha_" + format_number(alpha);
  if (!table.contains(key) || !table.contains("scales")) return std::nullopt;
  const auto scales = table.at("scales").get<std::vector<double>>();
  const auto& by_mode = table.at(key);
  const std::string m = risk::to_string(mode);
  if (!by_mode.contains(m)) return std::nullopt;
  const auto values = by_mode.at(m).get<std::vector<double>>();
  for (std::size_t i = 0; i < scales.size() && i < values.size(); ++i) {
    if (scales[i] == scale) return values[i];
  }
  return std::nullopt;
}

// Cells of a published table that break the trends the model guarantees.
void flag_reference_anomalies(const json& table, const std::string& name, std::vector<Discrepancy>& out) {
  if (table.is_null() || !table.contains("scales")) return;
  const auto scales = table.at("scales").get<std::vector<double>>();
  const std::vector<std::string> alphas{"alpha_1", "alpha_0.5", "alpha_0"};
  const std::vector<std::string> modes{"lower", "expected", "upper"};
  for (const auto& a : alphas) {
    if (!table.contains(a)) continue;
    for (const auto& m : modes) {
      if (!table.at(a).contains(m)) continue;
      const auto v = table.at(a).at(m).get<std::vector<double>>();
      for (std::size_t i = 1; i < v.size() && i < scales.size(); ++i) {
        if (v[i] < v[i - 1]) {
          out.push_back({name + " " + a + " " + m + " scale=" + num(scales[i]), v[i], v[i - 1],
                         "published value falls below the previous scale (" + num(scales[i - 1]) +
                             "); computed column holds that previous value"});
        }
      }
    }
    if (table.at(a).contains("lower") && table.at(a).contains("upper")) {
      const auto lo = table.at(a).at("lower").get<std::vector<double>>();
      const auto hi = table.at(a).at("upper").get<std::vector<double>>();
      for (std::size_t i = 0; i < lo.size() && i < hi.size() && i < scales.size(); ++i) {
        if (hi[i] < lo[i]) {
          out.push_back({name + " " + a + " upper scale=" + num(scales[i]), hi[i], lo[i],
                         "published upper bound lies below the lower bound; computed column holds the lower bound"});
        }
      }
    }
  }
}

void write_manifest(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& stages,
                    const std::string& status) {
  std::ofstream out(dir / "MANIFEST", std::ios::binary);
  out << "# evinsure run-case manifest\n";
  for (const auto& [name, st] : stages) out << "stage " << name << " " << st << "\n";
  out << "status " << status << "\n";
}

std::string mode_name(BoundMode m) { return risk::to_string(m); }

}  // namespace

SmpReference load_reference(const fs::path& path) {
  const json doc = io::read_json(path);
  SmpReference ref;
  try {
    ref.sojourn = vec5_from_json(doc.at("sojourn_hours"), "sojourn_hours");
    ref.steady_state = vec5_from_json(doc.at("steady_state"), "steady_state");
    if (doc.contains("box")) {
      ref.box_lower = doc.at("box").at("lower").get<double>();
      ref.box_upper = doc.at("box").at("upper").get<double>();
    }
    json tables;
    if (doc.contains("x_hat_table")) tables["x_hat"] = doc.at("x_hat_table");
    if (doc.contains("lambda_c_table")) tables["lambda_c"] = doc.at("lambda_c_table");
    ref.tables = tables;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return ref;
}

smp::Vector5 implied_embedded(const SmpReference& ref) {
  smp::Vector5 p = ref.steady_state.cwiseQuotient(ref.sojourn);
  return p / p.sum();
}

bool ReportBundle::ok() const {
  for (const auto& [name, st] : stages) {
    if (st != "ok") return false;
  }
  return !stages.empty();
}

void write_smp(const fs::path& dir, const smp::SmpAnalysis& a, const std::optional<SmpReference>& reference,
               const smp::ConfidenceBox& box) {
  json doc;
  json kernel = json::array();
  for (int i = 0; i < 5; ++i) {
    json row = json::array();
    for (int j = 0; j < 5; ++j) row.push_back(a.chain.kernel_inf(i, j));
    kernel.push_back(row);
  }
  doc["kernel_inf"] = kernel;
  doc["embedded_stationary"] = vec5_json(a.chain.stationary);
  doc["sojourn_hours"] = vec5_json(a.result.sojourn);
  doc["steady_state"] = vec5_json(a.result.steady_state);
  doc["p_attack"] = a.result.p_attack;
  doc["k_id_plus_k_if"] = a.chain.kernel_inf(1, 2) + a.chain.kernel_inf(1, 4);
  doc["quadrature_error"] = {{"k_id", a.k_id_error}, {"k_if", a.k_if_error}};
  doc["box"] = {{"center", box.center}, {"lower", box.lower}, {"upper", box.upper}};
  doc["units"] = {{"sojourn_hours", "hours"}, {"steady_state", "probability"}};
  if (reference) {
    const smp::SmpResult r = smp::attack_probability(implied_embedded(*reference), reference->sojourn);
    doc["reference_recomputed"] = {{"steady_state", vec5_json(r.steady_state)}, {"p_attack", r.p_attack}};
  }
  io::write_json(dir / "smp.json", doc);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < smp::kNumStates; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    rows.push_back({std::string(smp::state_name(static_cast<smp::State>(i))), num(a.result.sojourn[k]),
                    num(a.result.steady_state[k]), num(reference ? reference->sojourn[k] : kNaN),
                    num(reference ? reference->steady_state[k] : kNaN)});
  }
  io::write_csv(dir / "smp.csv", "SMP sojourn times and steady-state probabilities",
                "sojourn_hours [h], steady_state [-], reference columns in the same units",
                {"state", "sojourn_hours", "steady_state", "reference_sojourn_hours", "reference_steady_state"}, rows);
}

void write_tariff(const fs::path& dir, const grid::Network& net, const TypicalDaySet& days,
                  const grid::TariffTable& tariff) {
  std::vector<std::vector<std::string>> t_rows, d_rows;
  for (int s = 0; s < days.num_days(); ++s) {
    const std::string label = days.labels.empty() ? std::to_string(s + 1) : days.labels[s];
    for (int t = 0; t < days.num_hours(); ++t) {
      t_rows.push_back({label, std::to_string(t + 1), num(tariff.evcs.at(s, t))});
      const auto& r = tariff.per_day[static_cast<std::size_t>(s)];
      for (std::size_t b = 0; b < net.buses.size(); ++b) {
        d_rows.push_back({label, std::to_string(t + 1), bus_label(net.buses[b]), num(r.dlmp[t][b])});
      }
    }
  }
  io::write_csv(dir / "tariff.csv", "EVCS utility tariff at bus " + bus_label(net.evcs_bus), "lambda_u [cents/kWh]",
                {"day", "hour", "lambda_u"}, t_rows);
  io::write_csv(dir / "dlmp.csv", "Distribution locational marginal prices", "dlmp [$/MWh]",
                {"day", "hour", "bus", "dlmp"}, d_rows);
}

void write_analytic(const fs::path& dir, const premium::PolicyFactors& p, const premium::AnalyticSolution& sol) {
  json doc;
  doc["policy"] = {{"p_attack", p.p_attack},         {"loading", p.loading},
                   {"risk_share", p.risk_share},     {"history_coeff", p.history_coeff},
                   {"attack_count", p.attack_count}, {"penalty_usd_per_kw", p.penalty}};
  doc["premium_usd"] = sol.premium_usd;
  doc["premium_cents"] = sol.premium_cents;
  doc["x_hat_cents_per_kwh"] = sol.per_kwh;
  doc["charging_price_cents_per_kwh"] = vec_json(sol.charging_price);
  doc["omega"] = sol.omega;
  doc["ul_multiplier"] = sol.ul_multiplier;
  doc["composite_c"] = sol.composite;
  doc["revenue_weight"] = sol.revenue_weight;
  doc["base_cost_cents"] = sol.base_cost;
  io::write_json(dir / "analytic.json", doc);
}

json quote_to_json(const risk::PremiumQuote& q) {
  json doc;
  doc["alpha"] = q.alpha;
  doc["bound"] = mode_name(q.mode);
  doc["premium_usd"] = q.premium_usd;
  doc["premium_cents"] = q.premium_cents;
  doc["x_hat_cents_per_kwh"] = q.per_kwh;
  doc["charging_price_cents_per_kwh"] = vec_json(q.charging_price);
  doc["iterations"] = q.iterations;
  doc["trace_cents"] = vec_json(q.trace);
  doc["cyber_loss_gap_cents"] = q.cyber_loss_gap;
  doc["cvar_cents"] = q.evcs.cvar;
  doc["kkt"] = {{"primal_feasibility", q.kkt.primal_feasibility}, {"dual_sign", q.kkt.dual_sign},
                {"complementarity", q.kkt.complementarity},       {"stationarity_lambda", q.kkt.stationarity_lambda},
                {"stationarity_zeta", q.kkt.stationarity_zeta},   {"stationarity_v", q.kkt.stationarity_v},
                {"tail_identity", q.kkt.tail_identity}};
  return doc;
}

void write_quotes(const fs::path& dir, const std::vector<QuoteEntry>& quotes) {
  std::vector<std::vector<std::string>> rows, lam;
  json all = json::array();
  for (const auto& e : quotes) {
    rows.push_back({num(e.alpha), mode_name(e.mode), num(e.quote.premium_usd), num(e.quote.premium_cents),
                    num(e.quote.per_kwh), num(e.lambda_c_avg), std::to_string(e.quote.iterations),
                    num(e.quote.kkt.max()), num(e.quote.cyber_loss_gap)});
    for (std::size_t t = 0; t < e.quote.charging_price.size(); ++t) {
      lam.push_back({num(e.alpha), mode_name(e.mode), std::to_string(t + 1), num(e.quote.charging_price[t])});
    }
    all.push_back(quote_to_json(e.quote));
  }
  io::write_csv(dir / "quotes.csv", "Robust premium quotes at the frozen tariff",
                "premium_usd [$], premium_cents [cents], x_hat [cents/kWh], lambda_c_avg [cents/kWh], "
                "kkt_max [-], cyber_loss_gap [cents]",
                {"alpha", "bound", "premium_usd", "premium_cents", "x_hat", "lambda_c_avg", "iterations", "kkt_max",
                 "cyber_loss_gap"},
                rows);
  io::write_csv(dir / "lambda_c.csv", "Worst-case EV charging price per quote", "lambda_c [cents/kWh]",
                {"alpha", "bound", "hour", "lambda_c"}, lam);
  io::write_json(dir / "quotes.json", all);
}

void write_sweep(const fs::path& dir, const std::vector<trilevel::SweepRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    out.push_back({num(r.scale), num(r.alpha), mode_name(r.mode), num(r.lambda_c_avg), num(r.x_hat),
                   r.ok ? "ok" : "error"});
  }
  io::write_csv(dir / "sweep.csv", "Demand-scaling sweep at the EVCS bus",
                "scale [x], lambda_c_avg [cents/kWh], x_hat [cents/kWh]",
                {"scale", "alpha", "bound", "lambda_c_avg", "x_hat", "status"}, out);
}

void write_discrepancies(const fs::path& dir, const std::vector<Discrepancy>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& d : rows) {
    const double abs_delta = d.computed - d.reference;
    const double rel = std::abs(d.reference) > 0.0 ? abs_delta / std::abs(d.reference) : kNaN;
    std::string note = d.note;
    for (char& c : note) {
      if (c == ',') c = ';';
    }
    out.push_back({d.quantity, num(d.reference), num(d.computed), num(abs_delta), num(rel), note});
  }
  io::write_csv(dir / "discrepancy.csv", "Published versus computed values",
                "reference and computed in the unit of each quantity, rel_delta [-]",
                {"quantity", "reference", "computed", "delta", "rel_delta", "note"}, out);
}

void emit_plot_data(const ReportBundle& b, const fs::path& dir) {
  std::vector<std::vector<std::string>> demand;
  for (int s = 0; s < b.days.num_days(); ++s) {
    for (int t = 0; t < b.days.num_hours(); ++t) {
      demand.push_back({b.days.labels[static_cast<std::size_t>(s)], std::to_string(t + 1),
                        num(b.days.demand_kw[s][t]), num(b.days.likelihood[s])});
    }
  }
  io::write_csv(dir / "plot_demand.csv", "SYNTHETIC typical-day EVCS demand", "demand_kw [kW], likelihood [-]",
                {"day", "hour", "demand_kw", "likelihood"}, demand);

  std::vector<std::vector<std::string>> sens;
  for (const auto& r : b.sensitivity) sens.push_back({r.factor, num(r.value), num(r.x_hat)});
  io::write_csv(dir / "plot_sensitivity.csv", "Analytic premium sensitivity to the policy factors",
                "value [factor units], x_hat [cents/kWh]", {"factor", "value", "x_hat"}, sens);

  std::vector<std::vector<std::string>> scaling;
  for (const auto& r : b.sweep) {
    if (r.ok) scaling.push_back({num(r.scale), num(r.alpha), mode_name(r.mode), num(r.lambda_c_avg), num(r.x_hat)});
  }
  io::write_csv(dir / "plot_demand_scaling.csv", "Premium and charging price under scaled EVCS demand",
                "scale [x], lambda_c_avg [cents/kWh], x_hat [cents/kWh]",
                {"scale", "alpha", "bound", "lambda_c_avg", "x_hat"}, scaling);

  std::vector<std::vector<std::string>> bounds;
  for (const auto& q : b.quotes) {
    if (q.mode == BoundMode::Expected) continue;
    bounds.push_back({num(q.alpha), mode_name(q.mode), num(q.quote.per_kwh), num(q.lambda_c_avg)});
  }
  io::write_csv(dir / "plot_risk_bounds.csv", "Premium bounds against the risk level", "x_hat [cents/kWh], lambda_c_avg [cents/kWh]",
                {"alpha", "bound", "x_hat", "lambda_c_avg"}, bounds);
}

ReportBundle run_case(const io::CaseConfig& config) {
  config.validate();
  const fs::path dir = config.out_dir;
  fs::create_directories(dir);
  ReportBundle b;
  std::string failure;

  auto stage = [&](const std::string& name, auto&& body) {
    if (!failure.empty()) {
      b.stages.emplace_back(name, "skipped");
      return;
    }
    try {
      body();
      b.stages.emplace_back(name, "ok");
    } catch (const std::exception& e) {
      failure = name + ": " + e.what();
      b.stages.emplace_back(name, "failed");
    }
    write_manifest(dir, b.stages, failure.empty() ? "running" : "failed");
  };

  stage("inputs", [&] {
    b.network = io::load_network(config.network);
    b.days = io::load_typical_days(config.days);
    b.policy = io::load_policy(config.policy);
    if (!config.reference.empty()) b.reference = load_reference(config.reference);
  });

  stage("smp", [&] {
    b.smp = smp::analyze(io::load_smp(config.smp));
    double center = b.smp.result.p_attack;
    if (b.reference) {
      b.reference_result = smp::attack_probability(implied_embedded(*b.reference), b.reference->sojourn);
      center = b.reference_result->p_attack;
    }
    b.box = smp::relative_box(center, config.smp_rel_eps);
    write_smp(dir, b.smp, b.reference, b.box);
  });

  stage("tariff", [&] {
    b.tariff = grid::predetermined_tariff(b.network, b.days);
    write_tariff(dir, b.network, b.days, b.tariff);
  });

  stage("analytic", [&] {
    b.analytic = premium::closed_form_premium(b.policy, b.days, b.tariff.evcs);
    write_analytic(dir, b.policy, b.analytic);
  });

  const risk::PolicyBox box = config.policy_box.empty() ? risk::PolicyBox{} : io::load_policy_box(config.policy_box);

  stage("robust", [&] {
    for (double alpha : config.alphas) {
      for (BoundMode mode : config.bounds) {
        QuoteEntry e;
        e.alpha = alpha;
        e.mode = mode;
        e.quote = risk::robust_premium_bilevel(b.days, {alpha, box, mode}, b.tariff.evcs);
        e.lambda_c_avg = mean(e.quote.charging_price);
        b.quotes.push_back(std::move(e));
      }
    }
    write_quotes(dir, b.quotes);
  });

  stage("ccg_check", [&] {
    if (!config.ccg_check) return;
    std::vector<std::vector<std::string>> rows;
    double worst = 0.0;
    for (const auto& q : b.quotes) {
      const trilevel::TrilevelQuote t =
          trilevel::ccg_solve(b.network, b.days, {q.alpha, box, q.mode}, {25, config.tolerance});
      CcgCheckRow r;
      r.alpha = q.alpha;
      r.mode = q.mode;
      r.x_hat_direct = q.quote.per_kwh;
      r.x_hat_ccg = t.quote.per_kwh;
      r.relative_difference = std::abs(r.x_hat_ccg - r.x_hat_direct) / std::max(1.0, std::abs(r.x_hat_direct));
      r.iterations = t.state.iteration;
      r.dlmp_interval_width = t.dlmp_interval_width;
      worst = std::max(worst, r.relative_difference);
      rows.push_back({num(r.alpha), mode_name(r.mode), num(r.x_hat_direct), num(r.x_hat_ccg),
                      num(r.relative_difference), std::to_string(r.iterations), num(r.dlmp_interval_width)});
      b.ccg.push_back(r);
    }
    io::write_csv(dir / "ccg_check.csv", "Column-and-constraint generation against the direct solve",
                  "x_hat [cents/kWh], relative_difference [-], dlmp_interval_width [$/MWh]",
                  {"alpha", "bound", "x_hat_direct", "x_hat_ccg", "relative_difference", "iterations",
                   "dlmp_interval_width"},
                  rows);
    if (worst > config.tolerance) {
      throw NumericalError("C&CG and direct quotes differ by " + num(worst), worst);
    }
  });

  stage("sweep", [&] {
    b.sweep = trilevel::demand_scaling_sweep(b.network, b.days, box, config.scales, config.alphas, config.bounds,
                                             trilevel::method_from_string(config.sweep_method));
    b.sweep_check = trilevel::check_sweep(b.sweep);
    write_sweep(dir, b.sweep);
  });

  stage("sensitivity", [&] {
    std::vector<double> kappas{b.policy.history_coeff};
    if (auto it = config.sensitivity.find("history_coeff"); it != config.sensitivity.end()) kappas = it->second;
    for (const auto& [axis_name, grid] : config.sensitivity) {
      const premium::SweepAxis axis = premium::sweep_axis_from_string(axis_name);
      std::vector<std::pair<std::string, premium::PolicyFactors>> bases;
      if (axis == premium::SweepAxis::AttackCount) {
        for (double k : kappas) {
          premium::PolicyFactors p = b.policy;
          p.history_coeff = k;
          bases.emplace_back(axis_name + "@history_coeff=" + num(k), p);
        }
      } else {
        bases.emplace_back(axis_name, b.policy);
      }
      for (const auto& [factor, base] : bases) {
        for (const auto& pt : premium::sensitivity_sweep(base, axis, grid, b.days, b.tariff.evcs)) {
          b.sensitivity.push_back({factor, pt.value, pt.per_kwh});
        }
      }
    }
  });

  stage("discrepancy", [&] {
    auto& d = b.discrepancies;
    const double kid = b.smp.chain.kernel_inf(1, 2), kif = b.smp.chain.kernel_inf(1, 4);
    d.push_back({"k_ID + k_IF", 1.0, kid + kif, "embedded chain row of state I"});
    if (b.reference) {
      for (std::size_t i = 0; i < smp::kNumStates; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const std::string s(smp::state_name(static_cast<smp::State>(i)));
        d.push_back({"sojourn T_" + s + " [h]", b.reference->sojourn[k], b.smp.result.sojourn[k],
                     "computed from the Weibull transition laws"});
      }
      for (std::size_t i = 0; i < smp::kNumStates; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const std::string s(smp::state_name(static_cast<smp::State>(i)));
        d.push_back({"steady state P_" + s, b.reference->steady_state[k], b.smp.result.steady_state[k],
                     "computed from the Weibull transition laws"});
      }
      d.push_back({"p_attack from published P and T", b.reference->steady_state[4], b.reference_result->p_attack,
                   "embedded vector implied by P_s / T_s"});
      d.push_back({"P_D / P_C against T_D / T_C", b.reference->sojourn[2] / b.reference->sojourn[3],
                   b.reference->steady_state[2] / b.reference->steady_state[3], "published table ratios"});
      d.push_back({"P_G / P_I against T_G / T_I", b.reference->sojourn[0] / b.reference->sojourn[1],
                   b.reference->steady_state[0] / b.reference->steady_state[1], "published table ratios"});
      if (b.reference->box_upper > 0.0) {
        d.push_back({"attack probability box lower", b.reference->box_lower, b.box.lower, "relative box"});
        d.push_back({"attack probability box upper", b.reference->box_upper, b.box.upper, "relative box"});
      }
      const json& tables = b.reference->tables;
      for (const auto& r : b.sweep) {
        if (!r.ok) continue;
        if (tables.contains("x_hat")) {
          if (auto v = reference_cell(tables.at("x_hat"), r.alpha, r.mode, r.scale)) {
            d.push_back({"x_hat alpha=" + num(r.alpha) + " " + mode_name(r.mode) + " scale=" + num(r.scale) +
                             " [cents/kWh]",
                         *v, r.x_hat, "SYNTHETIC network; trend comparison only"});
          }
        }
        if (tables.contains("lambda_c")) {
          if (auto v = reference_cell(tables.at("lambda_c"), r.alpha, r.mode, r.scale)) {
            d.push_back({"lambda_c alpha=" + num(r.alpha) + " " + mode_name(r.mode) + " scale=" + num(r.scale) +
                             " [cents/kWh]",
                         *v, r.lambda_c_avg, "SYNTHETIC network; trend comparison only"});
          }
        }
      }
      if (tables.contains("x_hat")) flag_reference_anomalies(tables.at("x_hat"), "published x_hat", d);
      if (tables.contains("lambda_c")) flag_reference_anomalies(tables.at("lambda_c"), "published lambda_c", d);
    }
  });
  // The log exists even when an earlier stage failed.
  write_discrepancies(dir, b.discrepancies);

  stage("plots", [&] { emit_plot_data(b, dir); });

  write_manifest(dir, b.stages, failure.empty() ? "complete" : "failed: " + failure);
  return b;
}

std::vector<SensitivityRow> read_sensitivity_csv(const fs::path& path) {
  const io::CsvTable t = io::read_csv(path);
  const int cf = t.column("factor"), cv = t.column("value"), cx = t.column("x_hat");
  std::vector<SensitivityRow> out;
  for (const auto& r : t.rows) {
    const std::string where = path.string() + " row " + std::to_string(r.line);
    const double x = r.fields[cx] == "nan" ? kNaN : io::parse_number(r.fields[cx], where);
    out.push_back({r.fields[cf], io::parse_number(r.fields[cv], where), x});
  }
  return out;
}

std::vector<trilevel::SweepRow> read_sweep_csv(const fs::path& path) {
  const io::CsvTable t = io::read_csv(path);
  const int cs = t.column("scale"), ca = t.column("alpha"), cb = t.column("bound"), cl = t.column("lambda_c_avg"),
            cx = t.column("x_hat");
  int cst = -1;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == "status") cst = static_cast<int>(i);
  }
  std::vector<trilevel::SweepRow> out;
  for (const auto& r : t.rows) {
    const std::string where = path.string() + " row " + std::to_string(r.line);
    trilevel::SweepRow row;
    row.scale = io::parse_number(r.fields[cs], where);
    row.alpha = io::parse_number(r.fields[ca], where);
    row.mode = risk::bound_mode_from_string(r.fields[cb]);
    row.ok = cst < 0 || r.fields[cst] == "ok";
    row.lambda_c_avg = r.fields[cl] == "nan" ? kNaN : io::parse_number(r.fields[cl], where);
    row.x_hat = r.fields[cx] == "nan" ? kNaN : io::parse_number(r.fields[cx], where);
    out.push_back(row);
  }
  return out;
}

}  // namespace evinsure::report

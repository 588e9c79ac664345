// evinsure command-line front end.
#include "evinsure/case_io.hpp"
#include "evinsure/ccg_trilevel.hpp"
#include "evinsure/errors.hpp"
#include "evinsure/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace evinsure;

namespace {

struct Globals {
  std::string out = "out";
  unsigned long long seed = 1;
  double tolerance = 1e-6;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(io::parse_number(cell, "list '" + text + "'"));
  if (out.empty()) throw DomainError("empty list '" + text + "'");
  return out;
}

std::vector<risk::BoundMode> parse_bounds(const std::string& text) {
  std::vector<risk::BoundMode> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(risk::bound_mode_from_string(cell));
  return out;
}

fs::path out_dir(const Globals& g) {
  fs::create_directories(g.out);
  return g.out;
}

Tariff tariff_for(const std::string& tariff_csv, const std::string& network, const TypicalDaySet& days) {
  if (!tariff_csv.empty()) return io::load_tariff(tariff_csv, days.labels);
  if (network.empty()) throw DomainError("either --tariff or --network is required");
  return grid::predetermined_tariff(io::load_network(network), days).evcs;
}

void print(const char* label, double v) { std::printf("%-28s %.10g\n", label, v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cyber-insurance premium design for EV charging stations"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for the Weibull refit simulation")->capture_default_str();
  app.add_option("--tolerance", g.tolerance, "Convergence tolerance for C&CG and cross-checks")->capture_default_str();

  // smp
  auto* smp_cmd = app.add_subcommand("smp", "Attack probability from the semi-Markov attack model");
  std::string smp_file, reference_file;
  double rel_eps = 0.10;
  int fit_samples = 0;
  smp_cmd->add_option("--smp", smp_file, "Weibull transition JSON")->required()->check(CLI::ExistingFile);
  smp_cmd->add_option("--reference", reference_file, "Published sojourn and probability JSON")
      ->check(CLI::ExistingFile);
  smp_cmd->add_option("--rel-eps", rel_eps, "Relative width of the attack-probability box")->capture_default_str();
  smp_cmd->add_option("--fit-samples", fit_samples, "Simulate and refit this many samples per transition");

  // dlmp
  auto* dlmp_cmd = app.add_subcommand("dlmp", "DC-OPF DLMPs and the frozen EVCS tariff");
  std::string network_file, days_file;
  double scale = 1.0;
  dlmp_cmd->add_option("--network", network_file, "Network JSON")->required()->check(CLI::ExistingFile);
  dlmp_cmd->add_option("--days", days_file, "Typical-day CSV")->required()->check(CLI::ExistingFile);
  dlmp_cmd->add_option("--scale", scale, "EVCS demand multiplier")->capture_default_str();

  // premium-analytic
  auto* ana_cmd = app.add_subcommand("premium-analytic", "Closed-form premium at a predetermined tariff");
  std::string policy_file, tariff_file;
  ana_cmd->add_option("--days", days_file, "Typical-day CSV")->required()->check(CLI::ExistingFile);
  ana_cmd->add_option("--policy", policy_file, "Policy factor JSON")->required()->check(CLI::ExistingFile);
  ana_cmd->add_option("--network", network_file, "Network JSON for the DLMP tariff")->check(CLI::ExistingFile);
  ana_cmd->add_option("--tariff", tariff_file, "Tariff CSV (day,hour,lambda_u)")->check(CLI::ExistingFile);
  ana_cmd->add_option("--scale", scale, "EVCS demand multiplier")->capture_default_str();

  // premium-robust
  auto* rob_cmd = app.add_subcommand("premium-robust", "Risk-averse robust premium at a frozen tariff");
  std::string box_file, bound = "expected";
  double alpha = 1.0;
  rob_cmd->add_option("--days", days_file, "Typical-day CSV")->required()->check(CLI::ExistingFile);
  rob_cmd->add_option("--policy-box", box_file, "Policy box JSON")->required()->check(CLI::ExistingFile);
  rob_cmd->add_option("--network", network_file, "Network JSON for the DLMP tariff")->check(CLI::ExistingFile);
  rob_cmd->add_option("--tariff", tariff_file, "Tariff CSV (day,hour,lambda_u)")->check(CLI::ExistingFile);
  rob_cmd->add_option("--alpha", alpha, "CVaR level in [0, 1]")->capture_default_str();
  rob_cmd->add_option("--bound", bound, "lower, expected or upper")->capture_default_str();
  rob_cmd->add_option("--scale", scale, "EVCS demand multiplier")->capture_default_str();

  // premium-trilevel
  auto* tri_cmd = app.add_subcommand("premium-trilevel", "Premium with the DLMP tariff as the lowest level");
  std::string method = "ccg";
  tri_cmd->add_option("--network", network_file, "Network JSON")->required()->check(CLI::ExistingFile);
  tri_cmd->add_option("--days", days_file, "Typical-day CSV")->required()->check(CLI::ExistingFile);
  tri_cmd->add_option("--policy-box", box_file, "Policy box JSON")->required()->check(CLI::ExistingFile);
  tri_cmd->add_option("--alpha", alpha, "CVaR level in [0, 1]")->capture_default_str();
  tri_cmd->add_option("--bound", bound, "lower, expected or upper")->capture_default_str();
  tri_cmd->add_option("--scale", scale, "EVCS demand multiplier")->capture_default_str();
  tri_cmd->add_option("--mode", method, "ccg or direct")->capture_default_str();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Demand-scaling sweep over scales, alphas and bounds");
  std::string scales = "1,100,400,800,1000", alphas = "1,0.5,0", bounds = "lower,expected,upper";
  sweep_cmd->add_option("--network", network_file, "Network JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--days", days_file, "Typical-day CSV")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--policy-box", box_file, "Policy box JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--scales", scales, "Comma-separated demand multipliers")->capture_default_str();
  sweep_cmd->add_option("--alphas", alphas, "Comma-separated CVaR levels")->capture_default_str();
  sweep_cmd->add_option("--bounds", bounds, "Comma-separated bound modes")->capture_default_str();
  sweep_cmd->add_option("--method", method, "direct or ccg")->default_str("direct");

  // run-case
  auto* case_cmd = app.add_subcommand("run-case", "Full case-study pipeline from a case JSON");
  std::string case_file;
  case_cmd->add_option("--config", case_file, "Case JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*smp_cmd) {
      const fs::path dir = out_dir(g);
      const smp::SmpModel model = io::load_smp(smp_file);
      const smp::SmpAnalysis a = smp::analyze(model);
      std::optional<report::SmpReference> ref;
      double center = a.result.p_attack;
      if (!reference_file.empty()) {
        ref = report::load_reference(reference_file);
        center = smp::attack_probability(report::implied_embedded(*ref), ref->sojourn).p_attack;
      }
      const smp::ConfidenceBox box = smp::relative_box(center, rel_eps);
      report::write_smp(dir, a, ref, box);
      print("p_attack (transition laws)", a.result.p_attack);
      if (ref) print("p_attack (published P, T)", center);
      print("box lower", box.lower);
      print("box upper", box.upper);
      if (fit_samples > 0) {
        std::mt19937_64 rng(g.seed);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < smp::kNumTransitions; ++i) {
          const auto tr = static_cast<smp::Transition>(i);
          const smp::WeibullDist law = model.at(tr);
          std::weibull_distribution<double> draw(law.shape, law.scale);
          std::vector<double> samples(static_cast<std::size_t>(fit_samples));
          for (double& s : samples) s = draw(rng);
          const smp::WeibullDist fit = smp::fit_weibull(samples);
          rows.push_back({std::string(smp::transition_key(tr)), io::format_number(law.shape),
                          io::format_number(law.scale), io::format_number(fit.shape), io::format_number(fit.scale)});
        }
        io::write_csv(dir / "weibull_refit.csv", "Weibull refit of simulated transition times",
                      "shape [-], scale [h]", {"transition", "shape", "scale", "shape_fit", "scale_fit"}, rows);
      }
      return 0;
    }
    if (*dlmp_cmd) {
      const fs::path dir = out_dir(g);
      const grid::Network net = io::load_network(network_file);
      const TypicalDaySet days = io::load_typical_days(days_file).scaled(scale);
      const grid::TariffTable t = grid::predetermined_tariff(net, days);
      report::write_tariff(dir, net, days, t);
      double gap = 0.0;
      for (const auto& r : t.per_day) gap = std::max(gap, r.strong_duality_gap());
      print("max strong-duality gap", gap);
      return 0;
    }
    if (*ana_cmd) {
      const fs::path dir = out_dir(g);
      const TypicalDaySet days = io::load_typical_days(days_file).scaled(scale);
      const premium::PolicyFactors p = io::load_policy(policy_file);
      const premium::AnalyticSolution sol =
          premium::closed_form_premium(p, days, tariff_for(tariff_file, network_file, days));
      report::write_analytic(dir, p, sol);
      print("premium [$]", sol.premium_usd);
      print("x_hat [cents/kWh]", sol.per_kwh);
      return 0;
    }
    if (*rob_cmd) {
      const fs::path dir = out_dir(g);
      const TypicalDaySet days = io::load_typical_days(days_file).scaled(scale);
      const risk::RiskConfig cfg{alpha, io::load_policy_box(box_file), risk::bound_mode_from_string(bound)};
      const risk::PremiumQuote q =
          risk::robust_premium_bilevel(days, cfg, tariff_for(tariff_file, network_file, days));
      io::write_json(dir / "premium_robust.json", report::quote_to_json(q));
      print("premium [$]", q.premium_usd);
      print("x_hat [cents/kWh]", q.per_kwh);
      print("fixed-point iterations", q.iterations);
      return 0;
    }
    if (*tri_cmd) {
      const fs::path dir = out_dir(g);
      const grid::Network net = io::load_network(network_file);
      const TypicalDaySet days = io::load_typical_days(days_file).scaled(scale);
      const risk::RiskConfig cfg{alpha, io::load_policy_box(box_file), risk::bound_mode_from_string(bound)};
      const trilevel::Method m = trilevel::method_from_string(method);
      const trilevel::TrilevelQuote t = m == trilevel::Method::Ccg
                                            ? trilevel::ccg_solve(net, days, cfg, {25, g.tolerance})
                                            : trilevel::solve_trilevel_direct(net, days, cfg);
      nlohmann::json doc = report::quote_to_json(t.quote);
      doc["method"] = trilevel::to_string(t.method);
      doc["max_strong_duality_gap"] = t.max_strong_duality_gap;
      doc["dlmp_interval_width_usd_per_mwh"] = t.dlmp_interval_width;
      nlohmann::json trace = nlohmann::json::array();
      for (const auto& it : t.trace) {
        trace.push_back({{"k", it.k},
                         {"lower_bound", it.lower_bound},
                         {"upper_bound", std::isfinite(it.upper_bound) ? nlohmann::json(it.upper_bound) : nlohmann::json()},
                         {"principal_x_cents", it.principal_x}});
      }
      doc["ccg_trace"] = trace;
      io::write_json(dir / "premium_trilevel.json", doc);
      print("premium [$]", t.quote.premium_usd);
      print("x_hat [cents/kWh]", t.quote.per_kwh);
      if (m == trilevel::Method::Ccg) print("C&CG iterations", t.state.iteration);
      return 0;
    }
    if (*sweep_cmd) {
      const fs::path dir = out_dir(g);
      const grid::Network net = io::load_network(network_file);
      const TypicalDaySet days = io::load_typical_days(days_file);
      const auto rows = trilevel::demand_scaling_sweep(net, days, io::load_policy_box(box_file), parse_list(scales),
                                                       parse_list(alphas), parse_bounds(bounds),
                                                       trilevel::method_from_string(method));
      report::write_sweep(dir, rows);
      const trilevel::SweepCheck c = trilevel::check_sweep(rows);
      for (const auto& v : c.violations) std::printf("trend violation: %s\n", v.c_str());
      int failed = 0;
      for (const auto& r : rows) failed += r.ok ? 0 : 1;
      std::printf("%zu rows, %d failed\n", rows.size(), failed);
      return failed == 0 ? 0 : 1;
    }
    if (*case_cmd) {
      io::CaseConfig cfg = io::load_case_config(case_file);
      if (app.get_option("--out")->count() > 0) cfg.out_dir = g.out;
      if (app.get_option("--tolerance")->count() > 0) cfg.tolerance = g.tolerance;
      const report::ReportBundle b = report::run_case(cfg);
      for (const auto& [name, st] : b.stages) std::printf("%-12s %s\n", name.c_str(), st.c_str());
      if (!b.ok()) {
        std::fprintf(stderr, "run-case failed; see %s/MANIFEST\n", cfg.out_dir.string().c_str());
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

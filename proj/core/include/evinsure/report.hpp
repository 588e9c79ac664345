#pragma once

#include "evinsure/case_io.hpp"
#include "evinsure/ccg_trilevel.hpp"
#include "evinsure/dcopf_dlmp.hpp"
#include "evinsure/premium_analytic.hpp"
#include "evinsure/risk_cvar.hpp"
#include "evinsure/smp_attack.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace evinsure::report {

struct QuoteEntry {
  double alpha = 1.0;
  risk::BoundMode mode = risk::BoundMode::Expected;
  risk::PremiumQuote quote;
  double lambda_c_avg = 0.0;  // 24-hour mean, cents/kWh
};

struct CcgCheckRow {
  double alpha = 1.0;
  risk::BoundMode mode = risk::BoundMode::Expected;
  double x_hat_direct = 0.0;
  double x_hat_ccg = 0.0;
  double relative_difference = 0.0;
  int iterations = 0;
  double dlmp_interval_width = 0.0;  // $/MWh
};

struct SensitivityRow {
  std::string factor;
  double value = 0.0;
  double x_hat = 0.0;  // cents/kWh, NaN outside the domain
};

struct Discrepancy {
  std::string quantity;
  double reference = 0.0;
  double computed = 0.0;
  std::string note;
};

// Published SMP values: sojourn times and steady-state probabilities.
struct SmpReference {
  smp::Vector5 sojourn = smp::Vector5::Zero();
  smp::Vector5 steady_state = smp::Vector5::Zero();
  double box_lower = 0.0;
  double box_upper = 0.0;
  nlohmann::json tables;  // x_hat_table / lambda_c_table, may be null
};

SmpReference load_reference(const std::filesystem::path& path);

// Embedded-chain vector implied by published P_s and T_s, p_s proportional to P_s / T_s.
smp::Vector5 implied_embedded(const SmpReference& ref);

struct ReportBundle {
  smp::SmpAnalysis smp;
  std::optional<SmpReference> reference;
  std::optional<smp::SmpResult> reference_result;  // attack_probability on the published vectors
  smp::ConfidenceBox box;

  grid::Network network;
  TypicalDaySet days;
  grid::TariffTable tariff;

  premium::PolicyFactors policy;
  premium::AnalyticSolution analytic;

  std::vector<QuoteEntry> quotes;
  std::vector<CcgCheckRow> ccg;
  std::vector<trilevel::SweepRow> sweep;
  trilevel::SweepCheck sweep_check;
  std::vector<SensitivityRow> sensitivity;
  std::vector<Discrepancy> discrepancies;

  std::vector<std::pair<std::string, std::string>> stages;  // name, status
  bool ok() const;
};

// Runs every stage into config.out_dir. A failing stage stops the run; the
// MANIFEST records what completed and the bundle holds the partial results.
ReportBundle run_case(const io::CaseConfig& config);

// Tidy per-figure CSVs: plot_demand.csv, plot_sensitivity.csv,
// plot_demand_scaling.csv, plot_risk_bounds.csv.
void emit_plot_data(const ReportBundle& bundle, const std::filesystem::path& dir);

// Stage writers, also used by the single-stage CLI commands.
void write_smp(const std::filesystem::path& dir, const smp::SmpAnalysis& analysis,
               const std::optional<SmpReference>& reference, const smp::ConfidenceBox& box);
void write_tariff(const std::filesystem::path& dir, const grid::Network& net, const TypicalDaySet& days,
                  const grid::TariffTable& tariff);
void write_analytic(const std::filesystem::path& dir, const premium::PolicyFactors& policy,
                    const premium::AnalyticSolution& sol);
void write_quotes(const std::filesystem::path& dir, const std::vector<QuoteEntry>& quotes);
void write_sweep(const std::filesystem::path& dir, const std::vector<trilevel::SweepRow>& rows);
void write_discrepancies(const std::filesystem::path& dir, const std::vector<Discrepancy>& rows);

nlohmann::json quote_to_json(const risk::PremiumQuote& q);

// Readers for the emitted tables.
std::vector<SensitivityRow> read_sensitivity_csv(const std::filesystem::path& path);
std::vector<trilevel::SweepRow> read_sweep_csv(const std::filesystem::path& path);

}  // namespace evinsure::report

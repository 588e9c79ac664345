#pragma once

#include "evinsure/dcopf_dlmp.hpp"
#include "evinsure/risk_cvar.hpp"
#include "evinsure/typical_days.hpp"

#include <string>
#include <vector>

namespace evinsure::trilevel {

struct CcgIteration {
  int k = 0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;  // +inf until the subproblem certifies the insurer bound
  double principal_x = 0.0;  // cents
  double subproblem_norm2 = 0.0;
  double insurer_slack = 0.0;  // x - CL(lambda_sub), cents
};

struct CcgState {
  int iteration = 0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::vector<std::vector<double>> cuts;  // lambda^{c,(j)} per iteration
  std::vector<double> cut_norms;          // ||lambda^{c,(j)}||^2
  double x = 0.0;
  double tolerance = 1e-6;
};

enum class Method { Direct, Ccg };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct TrilevelQuote {
  risk::PremiumQuote quote;
  grid::TariffTable tariffs;
  std::vector<CcgIteration> trace;
  CcgState state;
  Method method = Method::Direct;
  double max_strong_duality_gap = 0.0;  // relative, over days
  double dlmp_interval_width = 0.0;     // $/MWh, widest optimal-dual range at the EVCS bus
};

// Lower level solved per day and frozen, then the robust bi-level fixed point.
TrilevelQuote solve_trilevel_direct(const grid::Network& net, const TypicalDaySet& days,
                                    const risk::RiskConfig& config);

struct CcgOptions {
  int max_iterations = 25;
  double tolerance = 1e-6;
};

// Column-and-constraint generation on the strong-duality single-level model.
// Throws ConvergenceError carrying the gap history at the iteration limit.
TrilevelQuote ccg_solve(const grid::Network& net, const TypicalDaySet& days, const risk::RiskConfig& config,
                        const CcgOptions& options = {});

struct SweepRow {
  double scale = 1.0;
  double alpha = 1.0;
  risk::BoundMode mode = risk::BoundMode::Expected;
  double lambda_c_avg = 0.0;  // 24-hour mean, cents/kWh
  double x_hat = 0.0;         // cents/kWh
  bool ok = true;
  std::string error;
};

std::vector<SweepRow> demand_scaling_sweep(const grid::Network& net, const TypicalDaySet& days,
                                           const risk::PolicyBox& box, const std::vector<double>& scales,
                                           const std::vector<double>& alphas,
                                           const std::vector<risk::BoundMode>& modes,
                                           Method method = Method::Direct);

struct SweepCheck {
  bool scale_monotone = true;   // nondecreasing in scale per (alpha, mode)
  bool alpha_monotone = true;   // nonincreasing in alpha per (scale, mode)
  bool spread_monotone = true;  // upper - lower nondecreasing as alpha falls
  std::vector<std::string> violations;
};

SweepCheck check_sweep(const std::vector<SweepRow>& rows, double slack = 1e-9);

}  // namespace evinsure::trilevel

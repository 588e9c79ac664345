#pragma once

#include "evinsure/opt_backend.hpp"
#include "evinsure/typical_days.hpp"

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace evinsure::grid {

struct Line {
  int from = 0;
  int to = 0;
  double reactance = 1.0;  // per unit
  double limit = 0.0;      // MW
};

struct Generator {
  int bus = 0;
  std::vector<double> cost;  // $/MWh, one value or one per hour
  double capacity = 0.0;     // MW

  double cost_at(int hour) const { return cost.size() == 1 ? cost[0] : cost.at(hour); }
};

struct Network {
  std::vector<int> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  // day label -> bus id -> hourly base demand (MW)
  std::map<std::string, std::map<int, std::vector<double>>> base_demand;
  int evcs_bus = 0;

  // Throws StructuralError on a disconnected graph, bad reactances or limits,
  // unknown buses or ragged demand.
  void validate() const;

  int reference_bus() const;  // lowest-numbered bus
  int bus_index(int bus) const;
  // Zero when the day or bus is absent.
  double base_load(const std::string& day, int bus, int hour) const;
  int hours() const;

  Network with_cost_scale(double factor) const;
};

Network network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const Network& net);

// Per-hour solution; tables are indexed [hour][element].
struct DlmpResult {
  std::vector<std::vector<double>> dispatch;    // g, MW
  std::vector<std::vector<double>> angle;       // theta, rad
  std::vector<std::vector<double>> flow;        // f, MW
  std::vector<std::vector<double>> dlmp;        // lambda, $/MWh, per bus index
  std::vector<std::vector<double>> alpha_upper; // generator cap duals
  std::vector<std::vector<double>> alpha_lower; // generator floor duals
  std::vector<std::vector<double>> xi;          // flow-equation duals
  std::vector<std::vector<double>> delta_upper; // flow-limit duals
  std::vector<std::vector<double>> delta_lower;
  std::vector<double> hourly_cost;              // $, per hour
  double c_ll = 0.0;   // primal generation cost, $
  double c_dll = 0.0;  // dual objective, maximisation form, $
  double balance_residual = 0.0;  // MW

  double strong_duality_gap() const;
  double evcs_dlmp(const Network& net, int hour) const;
};

// Solves every hour of day `day`; evcs_mw has one entry per hour.
// Throws InfeasibleError naming the first infeasible hour.
DlmpResult solve_dcopf(const Network& net, const std::string& day,
                       const std::vector<double>& evcs_mw);

// One LP over all hours; exists for the hour-separability property.
double solve_dcopf_joint_cost(const Network& net, const std::string& day,
                              const std::vector<double>& evcs_mw);

struct DualCheckReport {
  double generator_stationarity = 0.0;  // abar - alow - lambda_b(i) + C_i
  double line_stationarity = 0.0;       // xi + dbar - dlow + lambda_o - lambda_r
  double angle_balance = 0.0;           // sum_in xi/z - sum_out xi/z per non-reference bus
  double sign = 0.0;                    // negative parts of abar, alow, dbar, dlow
  double max() const;
};

DualCheckReport dual_feasibility_check(const DlmpResult& result, const Network& net,
                                       const std::string& day);

// Day-by-day DLMPs under the EVCS demand of `days`, frozen as a tariff.
struct TariffTable {
  std::vector<DlmpResult> per_day;
  Tariff evcs;  // cents/kWh at the EVCS bus
};

TariffTable predetermined_tariff(const Network& net, const TypicalDaySet& days);

// Primal, dual and strong-duality constraints of one hour in a single LP
// with zero objective. The optimal-dual face is its feasible set.
struct HourBlock {
  opt::LinearProgram lp;
  std::vector<int> g, f, theta, lambda, alpha_upper, alpha_lower, xi, delta_upper, delta_lower;
};

HourBlock build_hour_block(const Network& net, const std::string& day, int hour, double evcs_mw);

struct DlmpInterval {
  double lower = 0.0;  // $/MWh
  double upper = 0.0;
};

// Range of the DLMP at `bus` over every primal-dual optimal pair of the hour.
DlmpInterval dlmp_interval(const HourBlock& block, const Network& net, int bus);

}  // namespace evinsure::grid

#pragma once

#include <string>
#include <vector>

namespace evinsure {

// S representative days with likelihoods phi^s and hourly EVCS demand (kW).
struct TypicalDaySet {
  std::vector<std::string> labels;
  std::vector<double> likelihood;
  std::vector<std::vector<double>> demand_kw;  // [day][hour]

  int num_days() const { return static_cast<int>(likelihood.size()); }
  int num_hours() const { return demand_kw.empty() ? 0 : static_cast<int>(demand_kw.front().size()); }

  // Throws DomainError on negative demand, ragged days, bad likelihoods.
  void validate() const;

  // D_t = sum_s phi^s d_t^s.
  std::vector<double> expected_demand() const;
  double total_expected_demand() const;

  TypicalDaySet scaled(double factor) const;
};

// Utility tariff lambda^u in cents/kWh, one row per typical day.
struct Tariff {
  std::vector<std::vector<double>> cents_per_kwh;  // [day][hour]

  static Tariff flat(int days, int hours, double cents);
  static Tariff same_every_day(int days, const std::vector<double>& hourly);

  double at(int day, int hour) const { return cents_per_kwh[day][hour]; }
  // Throws DomainError unless the shape is days x hours with finite entries.
  void check_shape(int days, int hours) const;
};

}  // namespace evinsure

#include "evinsure/typical_days.hpp"

#include "evinsure/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace evinsure {

void TypicalDaySet::validate() const {
  if (likelihood.empty()) throw DomainError("typical-day set is empty");
  if (demand_kw.size() != likelihood.size()) {
    throw DomainError("typical-day set has " + std::to_string(likelihood.size()) +
                      " likelihoods but " + std::to_string(demand_kw.size()) + " demand rows");
  }
  if (!labels.empty() && labels.size() != likelihood.size()) {
    throw DomainError("typical-day labels do not match the number of days");
  }
  const std::size_t hours = demand_kw.front().size();
  if (hours == 0) throw DomainError("typical days have no hours");
  double total = 0.0;
  for (std::size_t s = 0; s < likelihood.size(); ++s) {
    if (!(likelihood[s] >= 0.0) || !std::isfinite(likelihood[s])) {
      throw DomainError("likelihood of day " + std::to_string(s + 1) + " is negative");
    }
    total += likelihood[s];
    if (demand_kw[s].size() != hours) {
      throw DomainError("day " + std::to_string(s + 1) + " has a different number of hours");
    }
    for (std::size_t t = 0; t < hours; ++t) {
      if (!(demand_kw[s][t] >= 0.0) || !std::isfinite(demand_kw[s][t])) {
        throw DomainError("negative demand on day " + std::to_string(s + 1) + " hour " +
                          std::to_string(t + 1));
      }
    }
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("likelihoods sum to " + std::to_string(total) + ", not 1");
  }
}

std::vector<double> TypicalDaySet::expected_demand() const {
  std::vector<double> d(static_cast<std::size_t>(num_hours()), 0.0);
  for (int s = 0; s < num_days(); ++s) {
    for (int t = 0; t < num_hours(); ++t) d[t] += likelihood[s] * demand_kw[s][t];
  }
  return d;
}

double TypicalDaySet::total_expected_demand() const {
  const auto d = expected_demand();
  return std::accumulate(d.begin(), d.end(), 0.0);
}

TypicalDaySet TypicalDaySet::scaled(double factor) const {
  TypicalDaySet out = *this;
  for (auto& day : out.demand_kw) {
    for (double& v : day) v *= factor;
  }
  return out;
}

Tariff Tariff::flat(int days, int hours, double cents) {
  Tariff t;
  t.cents_per_kwh.assign(static_cast<std::size_t>(days),
                         std::vector<double>(static_cast<std::size_t>(hours), cents));
  return t;
}

Tariff Tariff::same_every_day(int days, const std::vector<double>& hourly) {
  Tariff t;
  t.cents_per_kwh.assign(static_cast<std::size_t>(days), hourly);
  return t;
}

void Tariff::check_shape(int days, int hours) const {
  if (static_cast<int>(cents_per_kwh.size()) != days) {
    throw DomainError("tariff has " + std::to_string(cents_per_kwh.size()) + " days, expected " +
                      std::to_string(days));
  }
  for (const auto& row : cents_per_kwh) {
    if (static_cast<int>(row.size()) != hours) {
      throw DomainError("tariff row has " + std::to_string(row.size()) + " hours, expected " +
                        std::to_string(hours));
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw DomainError("tariff entry is not finite");
    }
  }
}

}  // namespace evinsure

#pragma once

#include "evinsure/case_io.hpp"
#include "evinsure/dcopf_dlmp.hpp"
#include "evinsure/premium_analytic.hpp"
#include "evinsure/risk_cvar.hpp"
#include "evinsure/typical_days.hpp"
#include "oracles.hpp"

#include <filesystem>
#include <string>

namespace support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(EVINSURE_FIXTURE_DIR) / name;
}

inline evinsure::TypicalDaySet random_days(oracle::Gen& g, int num_days, int hours = 24) {
  evinsure::TypicalDaySet d;
  d.likelihood = g.simplex(num_days);
  for (int s = 0; s < num_days; ++s) {
    d.labels.push_back(std::to_string(s + 1));
    std::vector<double> row;
    const double peak = g.uniform(10.0, 60.0);
    for (int t = 0; t < hours; ++t) row.push_back(peak * g.uniform(0.1, 1.0));
    d.demand_kw.push_back(row);
  }
  return d;
}

inline evinsure::Tariff random_tariff(oracle::Gen& g, int num_days, int hours = 24) {
  evinsure::Tariff t;
  for (int s = 0; s < num_days; ++s) {
    std::vector<double> row;
    for (int h = 0; h < hours; ++h) row.push_back(g.uniform(5.0, 35.0));
    t.cents_per_kwh.push_back(row);
  }
  return t;
}

// Factors drawn inside the case-study boxes.
inline evinsure::premium::PolicyFactors random_policy(oracle::Gen& g) {
  evinsure::premium::PolicyFactors p;
  p.p_attack = g.uniform(0.03582, 0.04378);
  p.loading = g.uniform(0.25, 0.35);
  p.risk_share = g.uniform(0.5, 1.0);
  p.history_coeff = g.uniform(0.2, 0.3);
  p.attack_count = g.integer(0, 3);
  p.penalty = g.uniform(1.0, 5.0);
  return p;
}

inline evinsure::risk::PolicyBox case_box() {
  evinsure::risk::PolicyBox b;
  b.p_attack = {0.03582, 0.04378};
  b.loading = {0.25, 0.35};
  b.history_coeff = {0.2, 0.3};
  b.risk_share = 1.0;
  b.attack_count = 1.0;
  b.penalty = 3.0;
  return b;
}

// Connected network on n buses: a random spanning tree plus extra lines.
// Generation capacity covers the load so every hour is feasible when
// `uncongested` lifts the line limits out of reach.
inline evinsure::grid::Network random_network(oracle::Gen& g, int n, int hours, bool uncongested) {
  evinsure::grid::Network net;
  for (int b = 1; b <= n; ++b) net.buses.push_back(b);
  auto add_line = [&](int a, int b) {
    evinsure::grid::Line l;
    l.from = a;
    l.to = b;
    l.reactance = g.uniform(0.05, 0.3);
    l.limit = uncongested ? 1e4 : g.uniform(20.0, 80.0);
    net.lines.push_back(l);
  };
  for (int b = 2; b <= n; ++b) add_line(g.integer(1, b - 1), b);
  const int extra = g.integer(0, n / 2);
  for (int e = 0; e < extra; ++e) {
    const int a = g.integer(1, n), b = g.integer(1, n);
    if (a != b) add_line(std::min(a, b), std::max(a, b));
  }
  double peak_total = 0.0;
  for (int b = 2; b <= n; ++b) {
    std::vector<double> series;
    const double peak = g.uniform(0.0, 25.0);
    for (int t = 0; t < hours; ++t) series.push_back(peak * g.uniform(0.5, 1.0));
    peak_total += peak;
    net.base_demand["1"][b] = series;
  }
  const int num_gen = g.integer(1, std::min(3, n));
  for (int i = 0; i < num_gen; ++i) {
    evinsure::grid::Generator gen;
    gen.bus = i == 0 ? 1 : g.integer(1, n);
    gen.cost = {g.uniform(10.0, 80.0)};
    // Slack generator at bus 1 can carry everything through the lines when
    // they are uncongested.
    gen.capacity = i == 0 ? peak_total + 200.0 : g.uniform(5.0, 40.0);
    net.generators.push_back(gen);
  }
  net.evcs_bus = g.integer(1, n);
  return net;
}

}  // namespace support

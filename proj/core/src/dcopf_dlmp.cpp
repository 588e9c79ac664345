#include "evinsure/dcopf_dlmp.hpp"

#include "evinsure/errors.hpp"
#include "evinsure/units.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

namespace evinsure::grid {

using opt::kInf;
using opt::LinearProgram;
using opt::RowSense;

void Network::validate() const {
  if (buses.empty()) throw StructuralError("network has no buses");
  std::set<int> ids(buses.begin(), buses.end());
  if (ids.size() != buses.size()) throw StructuralError("duplicate bus ids");
  auto known = [&](int b) { return ids.count(b) > 0; };
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const Line& ln = lines[l];
    const std::string tag = "line " + std::to_string(l) + " (" + std::to_string(ln.from) + "-" +
                            std::to_string(ln.to) + ")";
    if (!known(ln.from) || !known(ln.to)) throw StructuralError(tag + " references an unknown bus");
    if (ln.from == ln.to) throw StructuralError(tag + " is a self-loop");
    if (!(ln.reactance > 0.0) || !std::isfinite(ln.reactance)) {
      throw StructuralError(tag + " needs a positive reactance");
    }
    if (!(ln.limit > 0.0)) throw StructuralError(tag + " needs a positive flow limit");
  }
  const int h = hours();
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const Generator& g = generators[i];
    const std::string tag = "generator " + std::to_string(i) + " at bus " + std::to_string(g.bus);
    if (!known(g.bus)) throw StructuralError(tag + " sits on an unknown bus");
    if (!(g.capacity >= 0.0) || !std::isfinite(g.capacity)) {
      throw StructuralError(tag + " has a negative capacity");
    }
    if (g.cost.size() != 1 && static_cast<int>(g.cost.size()) != h) {
      throw StructuralError(tag + " cost series does not match " + std::to_string(h) + " hours");
    }
    for (double c : g.cost) {
      if (!std::isfinite(c)) throw StructuralError(tag + " has a non-finite cost");
    }
  }
  for (const auto& [day, per_bus] : base_demand) {
    for (const auto& [bus, series] : per_bus) {
      if (!known(bus)) throw StructuralError("base demand on unknown bus " + std::to_string(bus));
      if (static_cast<int>(series.size()) != h) {
        throw StructuralError("base demand of day " + day + " bus " + std::to_string(bus) +
                              " is not " + std::to_string(h) + " hours long");
      }
      for (double v : series) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw StructuralError("negative base demand on day " + day + " bus " + std::to_string(bus));
        }
      }
    }
  }
  if (!known(evcs_bus)) throw StructuralError("EVCS bus " + std::to_string(evcs_bus) + " is unknown");

  // Connectivity by breadth-first search from the reference bus.
  std::set<int> seen{reference_bus()};
  std::queue<int> frontier;
  frontier.push(reference_bus());
  while (!frontier.empty()) {
    const int b = frontier.front();
    frontier.pop();
    for (const Line& ln : lines) {
      const int other = ln.from == b ? ln.to : (ln.to == b ? ln.from : -1);
      if (other >= 0 && seen.insert(other).second) frontier.push(other);
    }
  }
  if (seen.size() != ids.size()) throw StructuralError("network graph is not connected");
}

int Network::reference_bus() const { return *std::min_element(buses.begin(), buses.end()); }

int Network::bus_index(int bus) const {
  const auto it = std::find(buses.begin(), buses.end(), bus);
  if (it == buses.end()) throw StructuralError("unknown bus " + std::to_string(bus));
  return static_cast<int>(it - buses.begin());
}

double Network::base_load(const std::string& day, int bus, int hour) const {
  const auto d = base_demand.find(day);
  if (d == base_demand.end()) return 0.0;
  const auto b = d->second.find(bus);
  if (b == d->second.end()) return 0.0;
  return b->second.at(static_cast<std::size_t>(hour));
}

int Network::hours() const {
  for (const auto& [day, per_bus] : base_demand) {
    for (const auto& [bus, series] : per_bus) return static_cast<int>(series.size());
  }
  for (const Generator& g : generators) {
    if (g.cost.size() > 1) return static_cast<int>(g.cost.size());
  }
  return 24;
}

Network Network::with_cost_scale(double factor) const {
  Network out = *this;
  for (Generator& g : out.generators) {
    for (double& c : g.cost) c *= factor;
  }
  return out;
}

Network network_from_json(const nlohmann::json& doc) {
  Network net;
  try {
    for (const auto& b : doc.at("buses")) net.buses.push_back(b.is_object() ? b.at("id").get<int>() : b.get<int>());
    for (const auto& l : doc.at("lines")) {
      net.lines.push_back({l.at("from").get<int>(), l.at("to").get<int>(),
                           l.at("reactance").get<double>(), l.at("limit").get<double>()});
    }
    for (const auto& g : doc.at("generators")) {
      Generator gen;
      gen.bus = g.at("bus").get<int>();
      const auto& c = g.at("cost");
      if (c.is_array()) {
        gen.cost = c.get<std::vector<double>>();
      } else {
        gen.cost = {c.get<double>()};
      }
      gen.capacity = g.at("capacity").get<double>();
      net.generators.push_back(gen);
    }
    if (doc.contains("base_demand")) {
      for (const auto& [day, per_bus] : doc.at("base_demand").items()) {
        for (const auto& [bus, series] : per_bus.items()) {
          net.base_demand[day][std::stoi(bus)] = series.get<std::vector<double>>();
        }
      }
    }
    net.evcs_bus = doc.at("evcs_bus").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ParseError("network JSON: base_demand bus keys must be integers");
  }
  net.validate();
  return net;
}

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json doc;
  doc["buses"] = net.buses;
  doc["lines"] = nlohmann::json::array();
  for (const Line& l : net.lines) {
    doc["lines"].push_back({{"from", l.from}, {"to", l.to}, {"reactance", l.reactance}, {"limit", l.limit}});
  }
  doc["generators"] = nlohmann::json::array();
  for (const Generator& g : net.generators) {
    nlohmann::json c = g.cost.size() == 1 ? nlohmann::json(g.cost[0]) : nlohmann::json(g.cost);
    doc["generators"].push_back({{"bus", g.bus}, {"cost", c}, {"capacity", g.capacity}});
  }
  doc["base_demand"] = nlohmann::json::object();
  for (const auto& [day, per_bus] : net.base_demand) {
    for (const auto& [bus, series] : per_bus) doc["base_demand"][day][std::to_string(bus)] = series;
  }
  doc["evcs_bus"] = net.evcs_bus;
  return doc;
}

namespace {

struct HourIndex {
  std::vector<int> g, f, theta;
  std::vector<int> flow_row, balance_row;
};

double nodal_load(const Network& net, const std::string& day, int hour, int b, double evcs_mw) {
  const int bus = net.buses[b];
  return net.base_load(day, bus, hour) + (bus == net.evcs_bus ? evcs_mw : 0.0);
}

HourIndex add_hour(LinearProgram& lp, const Network& net, const std::string& day, int hour,
                   double evcs_mw) {
  HourIndex ix;
  const int nb = static_cast<int>(net.buses.size());
  const int ref = net.bus_index(net.reference_bus());
  for (const Generator& g : net.generators) {
    ix.g.push_back(lp.add_variable(g.cost_at(hour), 0.0, g.capacity));
  }
  for (const Line& l : net.lines) ix.f.push_back(lp.add_variable(0.0, -l.limit, l.limit));
  for (int b = 0; b < nb; ++b) {
    ix.theta.push_back(b == ref ? lp.add_variable(0.0, 0.0, 0.0) : lp.add_variable(0.0, -kInf, kInf));
  }
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    const Line& ln = net.lines[l];
    const int o = ix.theta[net.bus_index(ln.from)];
    const int r = ix.theta[net.bus_index(ln.to)];
    ix.flow_row.push_back(lp.add_row({{o, 1.0 / ln.reactance}, {r, -1.0 / ln.reactance}, {ix.f[l], -1.0}},
                                     RowSense::Equal, 0.0));
  }
  for (int b = 0; b < nb; ++b) {
    std::vector<std::pair<int, double>> row;
    for (std::size_t i = 0; i < net.generators.size(); ++i) {
      if (net.generators[i].bus == net.buses[b]) row.emplace_back(ix.g[i], 1.0);
    }
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      if (net.lines[l].to == net.buses[b]) row.emplace_back(ix.f[l], 1.0);
      if (net.lines[l].from == net.buses[b]) row.emplace_back(ix.f[l], -1.0);
    }
    ix.balance_row.push_back(lp.add_row(row, RowSense::Equal, nodal_load(net, day, hour, b, evcs_mw)));
  }
  return ix;
}

void check_demand_length(const Network& net, const std::vector<double>& evcs_mw) {
  if (static_cast<int>(evcs_mw.size()) != net.hours()) {
    throw DomainError("EVCS profile has " + std::to_string(evcs_mw.size()) + " hours, network has " +
                      std::to_string(net.hours()));
  }
}

}  // namespace

double DlmpResult::strong_duality_gap() const { return std::abs(c_ll - c_dll); }

double DlmpResult::evcs_dlmp(const Network& net, int hour) const {
  return dlmp.at(static_cast<std::size_t>(hour)).at(static_cast<std::size_t>(net.bus_index(net.evcs_bus)));
}

DlmpResult solve_dcopf(const Network& net, const std::string& day, const std::vector<double>& evcs_mw) {
  check_demand_length(net, evcs_mw);
  DlmpResult res;
  const int nb = static_cast<int>(net.buses.size());
  for (int t = 0; t < net.hours(); ++t) {
    LinearProgram lp;
    const HourIndex ix = add_hour(lp, net, day, t, evcs_mw[t]);
    const opt::SolveResult sol = opt::solve_lp(lp);
    if (!sol.optimal()) {
      throw InfeasibleError("DC-OPF " + opt::to_string(sol.status) + " on day " + day + " hour " +
                            std::to_string(t + 1));
    }
    auto take = [&](const std::vector<int>& idx) {
      std::vector<double> v;
      for (int j : idx) v.push_back(sol.primal[j]);
      return v;
    };
    res.dispatch.push_back(take(ix.g));
    res.flow.push_back(take(ix.f));
    res.angle.push_back(take(ix.theta));
    std::vector<double> lam, xi, au, al, du, dl;
    for (int r : ix.balance_row) lam.push_back(sol.dual[r]);
    for (int r : ix.flow_row) xi.push_back(sol.dual[r]);
    for (int j : ix.g) {
      au.push_back(std::max(0.0, -sol.reduced_cost[j]));
      al.push_back(std::max(0.0, sol.reduced_cost[j]));
    }
    for (int j : ix.f) {
      du.push_back(std::max(0.0, -sol.reduced_cost[j]));
      dl.push_back(std::max(0.0, sol.reduced_cost[j]));
    }

    double dual_obj = 0.0;
    for (int b = 0; b < nb; ++b) dual_obj += lam[b] * nodal_load(net, day, t, b, evcs_mw[t]);
    for (std::size_t i = 0; i < net.generators.size(); ++i) dual_obj -= au[i] * net.generators[i].capacity;
    for (std::size_t l = 0; l < net.lines.size(); ++l) dual_obj -= (du[l] + dl[l]) * net.lines[l].limit;

    double bal = 0.0;
    for (int b = 0; b < nb; ++b) {
      double net_in = -nodal_load(net, day, t, b, evcs_mw[t]);
      for (std::size_t i = 0; i < net.generators.size(); ++i) {
        if (net.generators[i].bus == net.buses[b]) net_in += sol.primal[ix.g[i]];
      }
      for (std::size_t l = 0; l < net.lines.size(); ++l) {
        if (net.lines[l].to == net.buses[b]) net_in += sol.primal[ix.f[l]];
        if (net.lines[l].from == net.buses[b]) net_in -= sol.primal[ix.f[l]];
      }
      bal = std::max(bal, std::abs(net_in));
    }

    res.dlmp.push_back(lam);
    res.xi.push_back(xi);
    res.alpha_upper.push_back(au);
    res.alpha_lower.push_back(al);
    res.delta_upper.push_back(du);
    res.delta_lower.push_back(dl);
    res.hourly_cost.push_back(sol.objective);
    res.c_ll += sol.objective;
    res.c_dll += dual_obj;
    res.balance_residual = std::max(res.balance_residual, bal);
  }
  return res;
}

double solve_dcopf_joint_cost(const Network& net, const std::string& day,
                              const std::vector<double>& evcs_mw) {
  check_demand_length(net, evcs_mw);
  LinearProgram lp;
  for (int t = 0; t < net.hours(); ++t) add_hour(lp, net, day, t, evcs_mw[t]);
  const opt::SolveResult sol = opt::solve_lp(lp);
  if (!sol.optimal()) throw InfeasibleError("joint DC-OPF is " + opt::to_string(sol.status) + " on day " + day);
  return sol.objective;
}

double DualCheckReport::max() const {
  return std::max({generator_stationarity, line_stationarity, angle_balance, sign});
}

DualCheckReport dual_feasibility_check(const DlmpResult& r, const Network& net, const std::string&) {
  DualCheckReport rep;
  const int ref = net.bus_index(net.reference_bus());
  for (std::size_t t = 0; t < r.dlmp.size(); ++t) {
    for (std::size_t i = 0; i < net.generators.size(); ++i) {
      const Generator& g = net.generators[i];
      const double res = r.alpha_upper[t][i] - r.alpha_lower[t][i] -
                         r.dlmp[t][net.bus_index(g.bus)] + g.cost_at(static_cast<int>(t));
      rep.generator_stationarity = std::max(rep.generator_stationarity, std::abs(res));
      rep.sign = std::max({rep.sign, -r.alpha_upper[t][i], -r.alpha_lower[t][i]});
    }
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      const Line& ln = net.lines[l];
      const double res = r.xi[t][l] + r.delta_upper[t][l] - r.delta_lower[t][l] +
                         r.dlmp[t][net.bus_index(ln.from)] - r.dlmp[t][net.bus_index(ln.to)];
      rep.line_stationarity = std::max(rep.line_stationarity, std::abs(res));
      rep.sign = std::max({rep.sign, -r.delta_upper[t][l], -r.delta_lower[t][l]});
    }
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
      if (static_cast<int>(b) == ref) continue;
      double res = 0.0;
      for (std::size_t l = 0; l < net.lines.size(); ++l) {
        const Line& ln = net.lines[l];
        if (ln.to == net.buses[b]) res += r.xi[t][l] / ln.reactance;
        if (ln.from == net.buses[b]) res -= r.xi[t][l] / ln.reactance;
      }
      rep.angle_balance = std::max(rep.angle_balance, std::abs(res));
    }
  }
  return rep;
}

TariffTable predetermined_tariff(const Network& net, const TypicalDaySet& days) {
  days.validate();
  TariffTable out;
  for (int s = 0; s < days.num_days(); ++s) {
    std::vector<double> mw;
    for (double kw : days.demand_kw[s]) mw.push_back(units::kw_to_mw(kw));
    const std::string label = days.labels.empty() ? std::to_string(s + 1) : days.labels[s];
    out.per_day.push_back(solve_dcopf(net, label, mw));
    std::vector<double> row;
    for (int t = 0; t < days.num_hours(); ++t) {
      row.push_back(units::usd_per_mwh_to_cents_per_kwh(out.per_day.back().evcs_dlmp(net, t)));
    }
    out.evcs.cents_per_kwh.push_back(row);
  }
  return out;
}

HourBlock build_hour_block(const Network& net, const std::string& day, int hour, double evcs_mw) {
  HourBlock blk;
  LinearProgram& lp = blk.lp;
  const HourIndex ix = add_hour(lp, net, day, hour, evcs_mw);
  blk.g = ix.g;
  blk.f = ix.f;
  blk.theta = ix.theta;
  const int nb = static_cast<int>(net.buses.size());
  const int ref = net.bus_index(net.reference_bus());
  for (int b = 0; b < nb; ++b) blk.lambda.push_back(lp.add_variable(0.0, -kInf, kInf));
  for (std::size_t l = 0; l < net.lines.size(); ++l) blk.xi.push_back(lp.add_variable(0.0, -kInf, kInf));
  for (std::size_t i = 0; i < net.generators.size(); ++i) {
    blk.alpha_upper.push_back(lp.add_variable(0.0));
    blk.alpha_lower.push_back(lp.add_variable(0.0));
  }
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    blk.delta_upper.push_back(lp.add_variable(0.0));
    blk.delta_lower.push_back(lp.add_variable(0.0));
  }
  // The primal cost stays in the objective slot of add_hour; zero it.
  std::fill(lp.cost.begin(), lp.cost.end(), 0.0);

  for (std::size_t i = 0; i < net.generators.size(); ++i) {
    const Generator& g = net.generators[i];
    lp.add_row({{blk.alpha_upper[i], 1.0}, {blk.alpha_lower[i], -1.0}, {blk.lambda[net.bus_index(g.bus)], -1.0}},
               RowSense::Equal, -g.cost_at(hour));
  }
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    const Line& ln = net.lines[l];
    lp.add_row({{blk.xi[l], 1.0},
                {blk.delta_upper[l], 1.0},
                {blk.delta_lower[l], -1.0},
                {blk.lambda[net.bus_index(ln.from)], 1.0},
                {blk.lambda[net.bus_index(ln.to)], -1.0}},
               RowSense::Equal, 0.0);
  }
  for (int b = 0; b < nb; ++b) {
    if (b == ref) continue;
    std::vector<std::pair<int, double>> row;
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      const Line& ln = net.lines[l];
      if (ln.to == net.buses[b]) row.emplace_back(blk.xi[l], 1.0 / ln.reactance);
      if (ln.from == net.buses[b]) row.emplace_back(blk.xi[l], -1.0 / ln.reactance);
    }
    lp.add_row(row, RowSense::Equal, 0.0);
  }
  // Primal cost equals dual objective.
  std::vector<std::pair<int, double>> sd;
  for (std::size_t i = 0; i < net.generators.size(); ++i) {
    sd.emplace_back(blk.g[i], net.generators[i].cost_at(hour));
    sd.emplace_back(blk.alpha_upper[i], net.generators[i].capacity);
  }
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    sd.emplace_back(blk.delta_upper[l], net.lines[l].limit);
    sd.emplace_back(blk.delta_lower[l], net.lines[l].limit);
  }
  for (int b = 0; b < nb; ++b) sd.emplace_back(blk.lambda[b], -nodal_load(net, day, hour, b, evcs_mw));
  lp.add_row(sd, RowSense::Equal, 0.0);
  return blk;
}

DlmpInterval dlmp_interval(const HourBlock& block, const Network& net, int bus) {
  const int var = block.lambda.at(static_cast<std::size_t>(net.bus_index(bus)));
  DlmpInterval out;
  for (double sign : {1.0, -1.0}) {
    LinearProgram lp = block.lp;
    lp.cost[var] = sign;
    const opt::SolveResult sol = opt::solve_lp(lp);
    if (!sol.optimal()) {
      throw InfeasibleError("primal-dual block of the DC-OPF is " + opt::to_string(sol.status));
    }
    (sign > 0 ? out.lower : out.upper) = sol.primal[var];
  }
  return out;
}

}  // namespace evinsure::grid

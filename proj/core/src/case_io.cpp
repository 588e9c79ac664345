#include "evinsure/case_io.hpp"

#include "evinsure/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace evinsure::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

bool all_integer(const std::vector<std::string>& labels) {
  for (const auto& l : labels) {
    if (l.empty() || l.find_first_not_of("0123456789") != std::string::npos) return false;
  }
  return true;
}

risk::Interval interval_from_json(const json& v, const std::string& name) {
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  if (v.contains("center")) {
    const double c = v.at("center").get<double>();
    const double eps = v.value("rel_eps", 0.0);
    const smp::ConfidenceBox box = smp::relative_box(c, eps);
    return {box.lower, box.upper};
  }
  if (v.contains("lower") && v.contains("upper")) return {v.at("lower").get<double>(), v.at("upper").get<double>()};
  throw ParseError("policy box: '" + name + "' needs {lower, upper} or {center, rel_eps}");
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("CSV is missing column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      t.comments.push_back(trim(s.substr(1)));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(s);
      continue;
    }
    CsvRow row{lineno, split(s)};
    if (row.fields.size() != t.header.size()) {
      throw ParseError(source + " row " + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " fields, found " + std::to_string(row.fields.size()));
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ParseError(source + ": no header line");
  return t;
}

CsvTable read_csv(const fs::path& path) {
  auto in = open_input(path);
  return parse_csv(in, path.string());
}

double parse_number(const std::string& text, const std::string& where) {
  if (text.empty()) throw ParseError(where + ": empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    throw ParseError(where + ": '" + text + "' is not a number");
  }
  return v;
}

json read_json(const fs::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

TypicalDaySet parse_typical_days(std::istream& in, const std::string& source) {
  const CsvTable t = parse_csv(in, source);
  const int c_day = t.column("day"), c_phi = t.column("likelihood"), c_hour = t.column("hour"),
            c_d = t.column("demand_kw");
  struct Day {
    double phi = 0.0;
    int phi_row = 0;
    std::map<int, std::pair<double, int>> hours;  // hour -> (demand, row)
  };
  std::map<std::string, Day> days;
  for (const CsvRow& r : t.rows) {
    const std::string where = source + " row " + std::to_string(r.line);
    const std::string label = r.fields[c_day];
    if (label.empty()) throw ParseError(where + ": empty day label");
    const double phi = parse_number(r.fields[c_phi], where);
    const double hour_v = parse_number(r.fields[c_hour], where);
    const double d = parse_number(r.fields[c_d], where);
    if (hour_v != std::floor(hour_v) || hour_v < 1 || hour_v > 24) {
      throw ParseError(where + ": hour " + r.fields[c_hour] + " is outside 1..24");
    }
    if (!(d >= 0.0) || !std::isfinite(d)) throw ParseError(where + ": negative demand " + r.fields[c_d]);
    if (!(phi >= 0.0) || !std::isfinite(phi)) throw ParseError(where + ": negative likelihood");
    auto [it, fresh] = days.try_emplace(label);
    Day& day = it->second;
    if (fresh) {
      day.phi = phi;
      day.phi_row = r.line;
    } else if (phi != day.phi) {
      throw ParseError(where + ": likelihood of day " + label + " differs from row " + std::to_string(day.phi_row));
    }
    const int hour = static_cast<int>(hour_v);
    if (!day.hours.emplace(hour, std::make_pair(d, r.line)).second) {
      throw ParseError(where + ": duplicate hour " + std::to_string(hour) + " for day " + label);
    }
  }
  if (days.empty()) throw ParseError(source + ": no typical days");

  std::vector<std::string> labels;
  for (const auto& [label, day] : days) labels.push_back(label);
  if (all_integer(labels)) {
    std::stable_sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return std::stoll(a) < std::stoll(b);
    });
  }

  TypicalDaySet set;
  double total = 0.0;
  std::string rows;
  for (const auto& label : labels) {
    const Day& day = days.at(label);
    for (int h = 1; h <= 24; ++h) {
      if (!day.hours.count(h)) {
        throw ParseError(source + ": day " + label + " is missing hour " + std::to_string(h));
      }
    }
    std::vector<double> series;
    for (const auto& [h, v] : day.hours) series.push_back(v.first);
    set.labels.push_back(label);
    set.likelihood.push_back(day.phi);
    set.demand_kw.push_back(series);
    total += day.phi;
    rows += (rows.empty() ? "" : ", ") + std::to_string(day.phi_row);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", total);
    throw ParseError(source + ": likelihoods sum to " + buf + " (rows " + rows + "), expected 1");
  }
  for (double& phi : set.likelihood) phi /= total;
  set.validate();
  return set;
}

TypicalDaySet load_typical_days(const fs::path& path) {
  auto in = open_input(path);
  return parse_typical_days(in, path.string());
}

grid::Network load_network(const fs::path& path) { return grid::network_from_json(read_json(path)); }

smp::SmpModel smp_from_json(const json& doc) {
  std::array<smp::WeibullDist, smp::kNumTransitions> laws{};
  std::array<bool, smp::kNumTransitions> seen{};
  try {
    for (const auto& [key, v] : doc.at("transitions").items()) {
      const auto tr = smp::transition_from_key(key);
      if (!tr) throw ParseError("SMP JSON: unknown transition '" + key + "'");
      const auto i = static_cast<std::size_t>(*tr);
      laws[i] = smp::WeibullDist::make(v.at("shape").get<double>(), v.at("scale").get<double>());
      seen[i] = true;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("SMP JSON: ") + e.what());
  }
  for (std::size_t i = 0; i < smp::kNumTransitions; ++i) {
    if (!seen[i]) {
      throw StructuralError("SMP JSON: transition " +
                            std::string(smp::transition_key(static_cast<smp::Transition>(i))) + " is missing");
    }
  }
  return smp::SmpModel(laws);
}

smp::SmpModel load_smp(const fs::path& path) { return smp_from_json(read_json(path)); }

premium::PolicyFactors policy_from_json(const json& doc) {
  premium::PolicyFactors p;
  try {
    p.p_attack = doc.at("p_attack").get<double>();
    p.loading = doc.at("loading").get<double>();
    p.risk_share = doc.value("risk_share", 1.0);
    p.history_coeff = doc.value("history_coeff", 0.0);
    p.attack_count = doc.value("attack_count", 0.0);
    p.penalty = doc.value("penalty", 0.0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("policy JSON: ") + e.what());
  }
  p.validate();
  return p;
}

premium::PolicyFactors load_policy(const fs::path& path) { return policy_from_json(read_json(path)); }

risk::PolicyBox policy_box_from_json(const json& doc) {
  risk::PolicyBox box;
  try {
    box.p_attack = interval_from_json(doc.at("p_attack"), "p_attack");
    box.loading = interval_from_json(doc.at("loading"), "loading");
    box.history_coeff = doc.contains("history_coeff") ? interval_from_json(doc.at("history_coeff"), "history_coeff")
                                                      : risk::Interval{0.0, 0.0};
    box.risk_share = doc.value("risk_share", 1.0);
    box.attack_count = doc.value("attack_count", 0.0);
    box.penalty = doc.value("penalty", 0.0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("policy box JSON: ") + e.what());
  }
  box.validate();
  return box;
}

risk::PolicyBox load_policy_box(const fs::path& path) { return policy_box_from_json(read_json(path)); }

Tariff load_tariff(const fs::path& path, const std::vector<std::string>& labels) {
  const CsvTable t = read_csv(path);
  const int c_day = t.column("day"), c_hour = t.column("hour"), c_u = t.column("lambda_u");
  std::map<std::string, std::size_t> index;
  for (std::size_t s = 0; s < labels.size(); ++s) index[labels[s]] = s;
  std::vector<std::map<int, double>> cells(labels.size());
  for (const CsvRow& r : t.rows) {
    const std::string where = path.string() + " row " + std::to_string(r.line);
    const auto it = index.find(r.fields[c_day]);
    if (it == index.end()) throw ParseError(where + ": unknown day '" + r.fields[c_day] + "'");
    const double h = parse_number(r.fields[c_hour], where);
    if (h != std::floor(h) || h < 1 || h > 24) throw ParseError(where + ": hour outside 1..24");
    cells[it->second][static_cast<int>(h)] = parse_number(r.fields[c_u], where);
  }
  Tariff tariff;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (cells[s].size() != 24) throw ParseError(path.string() + ": day " + labels[s] + " is incomplete");
    std::vector<double> row;
    for (const auto& [h, v] : cells[s]) row.push_back(v);
    tariff.cents_per_kwh.push_back(row);
  }
  return tariff;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_csv(const fs::path& path, const std::string& title, const std::string& units,
               const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "# " << title << "\n# units: " << units << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

void CaseConfig::validate() const {
  for (const auto& [name, p] : {std::pair{"network", network}, std::pair{"days", days}, std::pair{"smp", smp},
                                std::pair{"policy", policy}, std::pair{"policy_box", policy_box}}) {
    if (p.empty() || !fs::exists(p)) throw DomainError(std::string("case config: ") + name + " file '" + p.string() + "' not found");
  }
  if (!reference.empty() && !fs::exists(reference)) {
    throw DomainError("case config: reference file '" + reference.string() + "' not found");
  }
  if (alphas.empty() || bounds.empty() || scales.empty()) throw DomainError("case config: empty run matrix");
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("case config: alpha " + format_number(a) + " outside [0, 1]");
  }
  for (double s : scales) {
    if (!(s > 0.0)) throw DomainError("case config: demand scales must be positive");
  }
  if (sweep_method != "direct" && sweep_method != "ccg") {
    throw DomainError("case config: sweep_method must be 'direct' or 'ccg'");
  }
  for (const auto& [axis, grid] : sensitivity) premium::sweep_axis_from_string(axis);
  if (!(tolerance > 0.0)) throw DomainError("case config: tolerance must be positive");
}

CaseConfig load_case_config(const fs::path& path) {
  const json doc = read_json(path);
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& key) -> fs::path {
    if (!doc.contains(key)) return {};
    const fs::path p = doc.at(key).get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  CaseConfig c;
  try {
    c.network = resolve("network");
    c.days = resolve("days");
    c.smp = resolve("smp");
    c.policy = resolve("policy");
    c.policy_box = resolve("policy_box");
    c.reference = resolve("reference");
    if (doc.contains("out_dir")) c.out_dir = resolve("out_dir");
    if (doc.contains("alphas")) c.alphas = doc.at("alphas").get<std::vector<double>>();
    if (doc.contains("bounds")) {
      c.bounds.clear();
      for (const auto& b : doc.at("bounds")) c.bounds.push_back(risk::bound_mode_from_string(b.get<std::string>()));
    }
    if (doc.contains("scales")) c.scales = doc.at("scales").get<std::vector<double>>();
    c.sweep_method = doc.value("sweep_method", c.sweep_method);
    c.ccg_check = doc.value("ccg_check", c.ccg_check);
    if (doc.contains("smp_box")) c.smp_rel_eps = doc.at("smp_box").value("rel_eps", c.smp_rel_eps);
    c.tolerance = doc.value("tolerance", c.tolerance);
    if (doc.contains("sensitivity")) {
      for (const auto& [axis, grid] : doc.at("sensitivity").items()) {
        c.sensitivity[axis] = grid.get<std::vector<double>>();
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

}  // namespace evinsure::io

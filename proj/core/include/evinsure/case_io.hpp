#pragma once

#include "evinsure/dcopf_dlmp.hpp"
#include "evinsure/premium_analytic.hpp"
#include "evinsure/risk_cvar.hpp"
#include "evinsure/smp_attack.hpp"
#include "evinsure/typical_days.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace evinsure::io {

struct CsvRow {
  int line = 0;  // 1-based line in the source
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> comments;  // '#' lines without the marker
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  // Index of a header column; ParseError when absent.
  int column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

double parse_number(const std::string& text, const std::string& where);

nlohmann::json read_json(const std::filesystem::path& path);

// Columns day,likelihood,hour,demand_kw. Days are sorted by label (numerically
// when every label is an integer) so row order does not matter.
TypicalDaySet parse_typical_days(std::istream& in, const std::string& source);
TypicalDaySet load_typical_days(const std::filesystem::path& path);

grid::Network load_network(const std::filesystem::path& path);

// {"transitions": {"GI": {"shape": b, "scale": a}, ...}}
smp::SmpModel smp_from_json(const nlohmann::json& doc);
smp::SmpModel load_smp(const std::filesystem::path& path);

premium::PolicyFactors policy_from_json(const nlohmann::json& doc);
premium::PolicyFactors load_policy(const std::filesystem::path& path);

// Uncertain factors are {lower, upper}, {center, rel_eps} or a bare number.
risk::PolicyBox policy_box_from_json(const nlohmann::json& doc);
risk::PolicyBox load_policy_box(const std::filesystem::path& path);

// Columns day,hour,lambda_u (cents/kWh), days in the order of `labels`.
Tariff load_tariff(const std::filesystem::path& path, const std::vector<std::string>& labels);

// Shortest text that reads back to the same double.
std::string format_number(double v);

// Writes "# <title>", "# units: <units>", the header, then the rows.
void write_csv(const std::filesystem::path& path, const std::string& title, const std::string& units,
               const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

struct CaseConfig {
  std::filesystem::path network;
  std::filesystem::path days;
  std::filesystem::path smp;
  std::filesystem::path policy;
  std::filesystem::path policy_box;
  std::filesystem::path reference;  // optional published values
  std::filesystem::path out_dir = "out";
  std::vector<double> alphas{1.0, 0.5, 0.0};
  std::vector<risk::BoundMode> bounds{risk::BoundMode::Lower, risk::BoundMode::Expected,
                                      risk::BoundMode::Upper};
  std::vector<double> scales{1.0};
  std::string sweep_method = "direct";
  bool ccg_check = true;       // cross-check the quotes with C&CG at scale 1
  double smp_rel_eps = 0.10;   // relative width of the attack-probability box
  double tolerance = 1e-6;
  // Axis name -> grid. "attack_count" is swept once per history coefficient.
  std::map<std::string, std::vector<double>> sensitivity;

  // Throws DomainError on an empty run matrix or a missing file.
  void validate() const;
};

// Relative paths resolve against the directory holding the config file.
CaseConfig load_case_config(const std::filesystem::path& path);

}  // namespace evinsure::io

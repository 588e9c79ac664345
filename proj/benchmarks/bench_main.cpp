#include "evinsure/case_io.hpp"
#include "evinsure/ccg_trilevel.hpp"
#include "evinsure/dcopf_dlmp.hpp"
#include "evinsure/premium_analytic.hpp"
#include "evinsure/risk_cvar.hpp"
#include "evinsure/smp_attack.hpp"
#include "evinsure/units.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace evinsure;

namespace {

std::filesystem::path fixture(const char* name) { return std::filesystem::path(EVINSURE_FIXTURE_DIR) / name; }

struct Data {
  smp::SmpModel smp = io::load_smp(fixture("smp_weibull.json"));
  grid::Network net = io::load_network(fixture("manhattan7.json"));
  TypicalDaySet days = io::load_typical_days(fixture("days.csv"));
  premium::PolicyFactors policy = io::load_policy(fixture("policy.json"));
  risk::PolicyBox box = io::load_policy_box(fixture("policy_box.json"));
  grid::TariffTable tariff = grid::predetermined_tariff(net, days);
};

const Data& data() {
  static const Data d;
  return d;
}

void BM_SmpAnalyze(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(smp::analyze(data().smp));
}
BENCHMARK(BM_SmpAnalyze)->Unit(benchmark::kMillisecond);

void BM_SolveDcopfDay(benchmark::State& st) {
  std::vector<double> mw;
  for (double kw : data().days.demand_kw[0]) mw.push_back(units::kw_to_mw(kw));
  for (auto _ : st) benchmark::DoNotOptimize(grid::solve_dcopf(data().net, data().days.labels[0], mw));
}
BENCHMARK(BM_SolveDcopfDay)->Unit(benchmark::kMillisecond);

void BM_ClosedFormPremium(benchmark::State& st) {
  for (auto _ : st) {
    benchmark::DoNotOptimize(premium::closed_form_premium(data().policy, data().days, data().tariff.evcs));
  }
}
BENCHMARK(BM_ClosedFormPremium);

void BM_RiskAverseEvcs(benchmark::State& st) {
  const risk::RiskConfig cfg{0.5, data().box, risk::BoundMode::Expected};
  for (auto _ : st) benchmark::DoNotOptimize(risk::solve_risk_averse_evcs(data().days, 2.0, cfg, data().tariff.evcs));
}
BENCHMARK(BM_RiskAverseEvcs)->Unit(benchmark::kMillisecond);

void BM_RobustPremium(benchmark::State& st) {
  const risk::RiskConfig cfg{0.5, data().box, risk::BoundMode::Upper};
  for (auto _ : st) benchmark::DoNotOptimize(risk::robust_premium_bilevel(data().days, cfg, data().tariff.evcs));
}
BENCHMARK(BM_RobustPremium)->Unit(benchmark::kMillisecond);

void BM_CcgSolve(benchmark::State& st) {
  const risk::RiskConfig cfg{0.5, data().box, risk::BoundMode::Expected};
  for (auto _ : st) benchmark::DoNotOptimize(trilevel::ccg_solve(data().net, data().days, cfg));
}
BENCHMARK(BM_CcgSolve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

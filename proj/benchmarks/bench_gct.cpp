#include <benchmark/benchmark.h>

#include <filesystem>

#include "gct/gct.hpp"

namespace {

const gct::ScenarioModel& scenario(const char* name) {
  static const gct::ScenarioModel s1 = gct::load_scenario(std::filesystem::path(GCT_SCENARIO_DIR) / "s1.json");
  static const gct::ScenarioModel s2 = gct::load_scenario(std::filesystem::path(GCT_SCENARIO_DIR) / "s2.json");
  return std::string_view(name) == "s1" ? s1 : s2;
}

const gct::Plan kPlan = gct::Plan::periodic_after_l(0.23371, 0.41173);

void BM_QuadratureS1(benchmark::State& state) {
  const auto& m = scenario("s1");
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gct::g_formula_quadrature(m, kPlan, {grid, 4, 1e-9, 1}));
}
BENCHMARK(BM_QuadratureS1)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_QuadratureS2(benchmark::State& state) {
  const auto& m = scenario("s2");
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gct::g_formula_quadrature(m, kPlan, {grid, 4, 1e-9, 1}));
}
BENCHMARK(BM_QuadratureS2)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto& m = scenario("s1");
  for (auto _ : state) benchmark::DoNotOptimize(gct::g_formula_mc(m, kPlan, 10000, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

void BM_CounterfactualOracle(benchmark::State& state) {
  const auto& m = scenario("s1");
  for (auto _ : state) benchmark::DoNotOptimize(gct::simulate_counterfactual_batch(m, kPlan, 10000, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_CounterfactualOracle)->Unit(benchmark::kMillisecond);

void BM_RunFilter(benchmark::State& state) {
  const auto& m = scenario("s2");
  const gct::Trajectory traj = gct::apply_plan(kPlan, std::vector<double>{0.12, 0.47, 0.81}, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gct::run_filter(m, traj, 1.0, true));
}
BENCHMARK(BM_RunFilter);

void BM_MarginalSurvival(benchmark::State& state) {
  const auto& m = scenario("s2");
  const std::vector<double> l{0.12};
  for (auto _ : state) benchmark::DoNotOptimize(gct::marginal_l_survival(m, kPlan, l, {0.12, 1.0}));
}
BENCHMARK(BM_MarginalSurvival);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "cfqkd/analytic.hpp"
#include "cfqkd/montecarlo.hpp"
#include "cfqkd/optimizer.hpp"

using namespace cfqkd;

namespace {

ProtocolConfig reference(Discrimination d) {
  return validate_config(RawConfig{0.1, 0.5, 0.1, 0.12, 0.1, 0.1, 0.1, 0.1, d});
}

void BM_AttackStats(benchmark::State& state) {
  const ProtocolConfig c = reference(Discrimination::None);
  const auto base = baseline_stats(c);
  int k = 0;
  for (auto _ : state) {
    const double x = (k = (k + 1) % 1001) / 1000.0;
    const AttackParams p = complete_params(c, AttackScenario::CombinedNoDisc, x, 0.5);
    const auto rep = ratio_report(attack_stats(c, AttackScenario::CombinedNoDisc, p), base);
    benchmark::DoNotOptimize(rep.max_deviation);
  }
}
BENCHMARK(BM_AttackStats);

void BM_OptimizeCell(benchmark::State& state) {
  const auto disc = static_cast<Discrimination>(state.range(0));
  const ProtocolConfig c = reference(disc);
  OptimizerOptions o;
  o.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(optimize(c, combined_scenario_for(disc), o).report.max_deviation);
}
BENCHMARK(BM_OptimizeCell)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SimulatePulses(benchmark::State& state) {
  const ProtocolConfig c = reference(Discrimination::None);
  const auto scenario = static_cast<AttackScenario>(state.range(0));
  const AttackParams p = is_combined(scenario) ? complete_params(c, scenario, 0.042, 0.668) : AttackParams{};
  const std::uint64_t pulses = 100000;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate(c, scenario, p, Source::Coherent, pulses, ++seed, 1).counts.d2);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * pulses));
}
BENCHMARK(BM_SimulatePulses)
    ->Arg(static_cast<int>(AttackScenario::Baseline))
    ->Arg(static_cast<int>(AttackScenario::BlindReduceLosses))
    ->Arg(static_cast<int>(AttackScenario::CombinedNoDisc))
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

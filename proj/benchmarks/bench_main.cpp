#include "greenprem/cost_model.hpp"
#include "greenprem/diffusion.hpp"
#include "greenprem/fitting.hpp"
#include "greenprem/sensitivity.hpp"
#include "greenprem/trajectory.hpp"

#include <benchmark/benchmark.h>

using namespace greenprem;

namespace {

const ScenarioSchedule& long_range() {
    static const auto s = default_schedule(VehicleClass::long_range);
    return s;
}

void BM_EvaluatePremiums(benchmark::State& state) {
    const auto sc = resolve_scenario(long_range(), 2021);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_premiums(sc));
}
BENCHMARK(BM_EvaluatePremiums);

void BM_PremiumSeries(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(premium_series(long_range(), 2010, 2030));
}
BENCHMARK(BM_PremiumSeries);

void BM_SensitivityTable(benchmark::State& state) {
    const auto sc = resolve_scenario(long_range(), 2021);
    const auto factors = default_factors();
    for (auto _ : state) benchmark::DoNotOptimize(sensitivity_table(sc, factors));
}
BENCHMARK(BM_SensitivityTable);

void BM_Simulate(benchmark::State& state) {
    const auto path = lifecycle_path(premium_series(long_range(), 2010, 2030));
    const BassParams bp{0.001, 0.59, 120800.0, -0.85};
    for (auto _ : state) benchmark::DoNotOptimize(simulate(bp, path, 2010, 21));
}
BENCHMARK(BM_Simulate);

void BM_GaFit(benchmark::State& state) {
    const auto path = lifecycle_path(premium_series(long_range(), 2010, 2030));
    const BassParams truth{0.002, 0.40, 1000.0, -2.0};
    std::vector<Observation> pts;
    for (const auto& s : simulate(truth, path, 2010, 12)) pts.push_back({s.year, s.new_adopters});
    const auto obs = make_observations(pts);
    FitConfig cfg;
    cfg.m_fixed = truth.m;
    cfg.population_size = static_cast<int>(state.range(0));
    cfg.max_generations = 100;
    cfg.early_stop = false;
    cfg.rng_seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(ga_fit(obs, &path, cfg));
}
BENCHMARK(BM_GaFit)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

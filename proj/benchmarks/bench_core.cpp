#include <benchmark/benchmark.h>

#include "debtnet/dynamics.hpp"
#include "debtnet/experiment.hpp"
#include "debtnet/io.hpp"
#include "debtnet/reconstruction.hpp"
#include "debtnet/rng.hpp"
#include "debtnet/stability.hpp"

namespace {

using namespace debtnet;

BankingSystem bench_system(int n) {
    SyntheticParams params;
    params.n_banks = n;
    params.seed = 7;
    return generate_synthetic(params);
}

void ContagionRun(benchmark::State& state) {
    const auto system = bench_system(static_cast<int>(state.range()));
    const auto samples = reconstruct_ensemble(system, 0.05, 1, 3);
    const auto leverage = build_leverage(system, samples[0].weights);
    auto rng = make_rng(5);
    const auto shocked = sample_shock_set(system.size(), 0.05, rng);
    for (auto _ : state) {
        const auto traj =
            run(system, leverage, shocked, 0.005, PropagationRule::nonlinear(1.0));
        benchmark::DoNotOptimize(traj.final_h.data());
    }
}
BENCHMARK(ContagionRun)->Arg(64)->Arg(183);

void RasBalancing(benchmark::State& state) {
    const auto system = bench_system(static_cast<int>(state.range()));
    const auto samples = reconstruct_ensemble(system, 0.05, 1, 9);
    const auto& adjacency = samples[0].adjacency;
    const auto rows = system.interbank_asset_totals();
    const auto cols = system.interbank_liability_totals();
    for (auto _ : state) {
        auto result = balance_weights(adjacency, rows, cols);
        benchmark::DoNotOptimize(result.network.weights.data());
    }
}
BENCHMARK(RasBalancing)->Arg(64)->Arg(183);

void PowerIteration(benchmark::State& state) {
    const auto system = bench_system(static_cast<int>(state.range()));
    const auto samples = reconstruct_ensemble(system, 0.05, 1, 3);
    const auto leverage = build_leverage(system, samples[0].weights);
    for (auto _ : state) {
        auto result = spectral_radius(leverage.lambda);
        benchmark::DoNotOptimize(result.lambda_max);
    }
}
BENCHMARK(PowerIteration)->Arg(64)->Arg(183);

}  // namespace

BENCHMARK_MAIN();

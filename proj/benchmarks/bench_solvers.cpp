#include <benchmark/benchmark.h>

#include "mts2/equilibrium.hpp"
#include "mts2/experiments.hpp"
#include "mts2/performance.hpp"
#include "mts2/planner.hpp"
#include "mts2/producer.hpp"
#include "mts2/simulator.hpp"

namespace {

mts2::MarketParams baseline(double kappa = 1.0, double rho = 0.9) {
    mts2::MarketParams p;
    p.mu = 1.0;
    p.lambda_cap = {rho / 2.0, rho / 2.0};
    p.reward = {10.0, 10.0};
    p.price = {5.0, 5.0};
    p.wait_cost = {3.0, 3.0 * kappa};
    p.hold_cost = {0.4, 0.4};
    return p;
}

void PerformanceReportEval(benchmark::State& state) {
    const mts2::MarketParams p = baseline();
    mts2::EffectiveRates rates;
    rates.lambda = {0.4, 0.35};
    mts2::InventoryPolicy policy;
    policy.target = {3, 2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mts2::report(rates, policy, p));
    }
}
BENCHMARK(PerformanceReportEval);

void EquilibriumSolve(benchmark::State& state) {
    const mts2::MarketParams p = baseline(static_cast<double>(state.range(0)));
    mts2::InventoryPolicy policy;
    policy.target = {3, 2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mts2::solve_equilibrium(p, policy));
    }
}
BENCHMARK(EquilibriumSolve)->Arg(1)->Arg(5)->Arg(20);

void ProducerOptimize(benchmark::State& state) {
    const mts2::MarketParams p = baseline(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mts2::optimize_policy(p));
    }
}
BENCHMARK(ProducerOptimize)->Arg(1)->Arg(20);

void PlannerOptimize(benchmark::State& state) {
    const mts2::MarketParams p = baseline(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mts2::optimize_welfare(p));
    }
}
BENCHMARK(PlannerOptimize)->Arg(1)->Arg(20);

void SweepCellSolve(benchmark::State& state) {
    mts2::SweepSpec spec;
    spec.base = baseline();
    for (auto _ : state) {
        benchmark::DoNotOptimize(mts2::solve_cell(spec, 10.0, 0.8, 1.0));
    }
}
BENCHMARK(SweepCellSolve);

void SimulateReplications(benchmark::State& state) {
    const mts2::MarketParams p = baseline();
    mts2::InventoryPolicy policy;
    policy.target = {2, 2};
    mts2::SimConfig config;
    config.num_arrivals = state.range(0);
    config.replications = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mts2::simulate(p, policy, {}, config));
    }
    state.SetItemsProcessed(state.iterations() * config.num_arrivals * config.replications);
}
BENCHMARK(SimulateReplications)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();

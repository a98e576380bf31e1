#include <benchmark/benchmark.h>

#include "dgrecon/dg_parabolic.hpp"
#include "dgrecon/reconstruction.hpp"

using namespace dgrecon;

static void Reconstruct(benchmark::State& state)
{
    const auto P = build_geometric(1.0, static_cast<int>(state.range(0)), 0.5);
    const auto u = random_piecewise_poly(P, static_cast<int>(state.range(1)), 16, 1);
    const Vector u0 = Vector::Ones(16);
    for (auto _ : state)
        benchmark::DoNotOptimize(reconstruct(u, u0));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(Reconstruct)->ArgsProduct({{16, 64, 256, 1024}, {1, 3}})->Complexity();

static void BochnerNorm(benchmark::State& state)
{
    const auto S = SpaceTriplet::laplace1d(16);
    const auto u = random_piecewise_poly(build_uniform(1.0, static_cast<int>(state.range(0))), 2, 16, 2);
    const double p = state.range(1) / 2.0; // 1, 1.5, 2, 3
    for (auto _ : state)
        benchmark::DoNotOptimize(bochner_norm(u, S, {p, Norm::X, 2}));
    state.SetLabel("p=" + std::to_string(p));
}
BENCHMARK(BochnerNorm)->ArgsProduct({{16, 128}, {2, 3, 4, 6}});

static void SolveHeat(benchmark::State& state)
{
    const auto prob = parse_problem_spec("heat", SpaceTriplet::laplace1d(64));
    const auto P = build_geometric(1.0, static_cast<int>(state.range(0)), 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(prob, P, static_cast<int>(state.range(1))));
}
BENCHMARK(SolveHeat)->ArgsProduct({{16, 64, 256}, {0, 2}});

// Dense slab solve: P1 finite elements are not spectral.
static void SolveHeatDense(benchmark::State& state)
{
    const auto prob = parse_problem_spec("heat", SpaceTriplet::p1_laplace1d(static_cast<int>(state.range(0))));
    const auto P = build_uniform(1.0, 32);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(prob, P, 1));
}
BENCHMARK(SolveHeatDense)->Arg(15)->Arg(31)->Arg(63);

static void SolveAllenCahn(benchmark::State& state)
{
    const auto prob = parse_problem_spec("semilinear", SpaceTriplet::laplace1d(static_cast<int>(state.range(0))));
    const auto P = build_geometric(1.0, 32, 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(prob, P, 1));
}
BENCHMARK(SolveAllenCahn)->Arg(8)->Arg(32);

BENCHMARK_MAIN();

// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include "robinlab/kernels.hpp"
#include "robinlab/oracle/fem.hpp"

using namespace robinlab;
using kernels::Exec;

namespace {

Domain bench_domain(int nodes)
{
    TrigPolynomial p;
    p.cos_coeffs = {1.0, 0.0, 0.08, 0.03};
    p.sin_coeffs = {0.0, 0.0, 0.0, 0.0, 0.02};
    return Domain::star2d(p, 1.0, nodes);
}

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_SingleLayer(benchmark::State& state)
{
    const BoundaryGrid g = boundary_grid(bench_domain(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::single_layer_matrix(g, exec_of(state)));
}

void BM_AdjointDoubleLayer(benchmark::State& state)
{
    const BoundaryGrid g = boundary_grid(bench_domain(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::adjoint_double_layer_matrix(g, exec_of(state)));
}

void BM_FemAssemble(benchmark::State& state)
{
    const int rings = static_cast<int>(state.range(0));
    const fem::Mesh m = fem::polar_mesh(bench_domain(256), rings, 4 * rings);
    for (auto _ : state) benchmark::DoNotOptimize(fem::assemble(m, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_SingleLayer)->ArgsProduct({{128, 256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdjointDoubleLayer)->ArgsProduct({{128, 256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FemAssemble)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv)
{
    kernels::apply_thread_cap_from_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

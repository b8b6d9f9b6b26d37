#include "fbindex/envelope.hpp"
#include "fbindex/experiments.hpp"
#include "fbindex/fem.hpp"
#include "fbindex/mesh.hpp"
#include "fbindex/spectra.hpp"

#include <benchmark/benchmark.h>

using namespace fbindex;

static void BM_AnnulusMesh(benchmark::State& state) {
    const int nr = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(annulus_mesh(4.0, nr, 4 * nr));
}
BENCHMARK(BM_AnnulusMesh)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Assemble(benchmark::State& state) {
    const TriMesh m = hairpin_mesh(3.0, static_cast<int>(state.range(0)), 16);
    for (auto _ : state) benchmark::DoNotOptimize(assemble(m));
}
BENCHMARK(BM_Assemble)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

// envelope LDLt inertia, the index path
static void BM_MorseIndex(benchmark::State& state) {
    const int nr = static_cast<int>(state.range(0));
    const AssembledForms f = assemble(annulus_mesh(4.0, nr, 4 * nr));
    for (auto _ : state) benchmark::DoNotOptimize(morse_index(f));
    state.counters["dofs"] = f.dimension();
}
BENCHMARK(BM_MorseIndex)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_LowestEigenpairsDense(benchmark::State& state) {
    const AssembledForms f = assemble(disk_mesh(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(lowest_eigenpairs(f, 1));
    state.counters["dofs"] = f.dimension();
}
BENCHMARK(BM_LowestEigenpairsDense)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_LowestEigenvalueSlicing(benchmark::State& state) {
    const AssembledForms f = assemble(disk_mesh(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(lowest_eigenvalue(f, 1e-10));
    state.counters["dofs"] = f.dimension();
}
BENCHMARK(BM_LowestEigenvalueSlicing)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "etd/backprop.hpp"
#include "etd/forward.hpp"
#include "etd/imaging.hpp"

using namespace etd;

namespace {

struct Scene {
    Medium med;
    Inclusion inc;
    TrialInclusion trial;
    BoundaryGrid grid = circle_boundary(10.0, 512);
    std::vector<PlaneWave> probes;
    std::vector<ComplexVecField> data;
    SearchGrid targets;

    Scene(int n, int count) {
        inc.za = make_point(0.4, -0.25);
        probes = make_probes(Mode::S, uniform_directions(n, 2));
        for (const auto& p : probes) data.push_back(filtered_data(med, inc, p, grid));
        targets = make_lattice(inc.za, count, 0.04);
    }
};

}  // namespace

static void BM_FilteredData(benchmark::State& state) {
    const Scene s(1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(filtered_data(s.med, s.inc, s.probes[0], s.grid));
}
BENCHMARK(BM_FilteredData);

static void BM_Backpropagate(benchmark::State& state) {
    const Scene s(1, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(backpropagate(s.data[0], s.grid, s.med, s.targets, Kernel::S, true));
    state.SetItemsProcessed(state.iterations() * s.targets.size());
}
BENCHMARK(BM_Backpropagate)->Arg(11)->Arg(31)->Unit(benchmark::kMillisecond);

static void BM_WeightedImage(benchmark::State& state) {
    const Scene s(static_cast<int>(state.range(0)), 21);
    for (auto _ : state)
        benchmark::DoNotOptimize(iwf(s.med, s.trial, s.probes, s.data, s.grid, s.targets));
}
BENCHMARK(BM_WeightedImage)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

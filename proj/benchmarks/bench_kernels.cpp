#include <benchmark/benchmark.h>

#include "etd/kupradze.hpp"
#include "etd/scalar_waves.hpp"

using namespace etd;

static void BM_Hankel1Sequence(benchmark::State& state) {
    const int nmax = static_cast<int>(state.range(0));
    std::vector<cplx> out(nmax + 1);
    double x = 0.5;
    for (auto _ : state) {
        hankel1_seq(x, nmax, out.data());
        benchmark::DoNotOptimize(out.data());
        x = x < 50.0 ? x + 0.37 : 0.5;
    }
}
BENCHMARK(BM_Hankel1Sequence)->Arg(2)->Arg(4);

static void BM_ModalKernels(benchmark::State& state) {
    const Medium med;
    const int d = static_cast<int>(state.range(0));
    Point x = d == 2 ? make_point(0.3, -0.7) : make_point(0.3, -0.7, 0.2);
    for (auto _ : state) {
        auto k = modal_kernels(med, x, true);
        benchmark::DoNotOptimize(k);
        x[0] += 1e-3;
    }
}
BENCHMARK(BM_ModalKernels)->Arg(2)->Arg(3);

static void BM_ImHessGamma(benchmark::State& state) {
    const Medium med;
    Point x = make_point(0.3, -0.7);
    for (auto _ : state) {
        auto h = im_hess_gamma_alpha(med, Mode::S, x);
        benchmark::DoNotOptimize(h);
        x[0] += 1e-3;
    }
}
BENCHMARK(BM_ImHessGamma);

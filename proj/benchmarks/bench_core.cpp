#include <benchmark/benchmark.h>

#include "wittlab/exponential.hpp"
#include "wittlab/kummer.hpp"
#include "wittlab/witt.hpp"

using namespace wittlab;

static void BM_WittKernel(benchmark::State& state) {
    long p = state.range(0), r = state.range(1);
    for (auto _ : state) {
        WittContext ctx(p);
        benchmark::DoNotOptimize(ctx.kernel(WittContext::Kernel::mul, r));
    }
}
BENCHMARK(BM_WittKernel)->Args({2, 3})->Args({2, 4})->Args({3, 3});

static void BM_EisMul(benchmark::State& state) {
    RingPtr R = make_eisenstein_ring(2, 2, state.range(0));
    uint64_t s = 42;
    std::vector<uint32_t> da(R->eis.max_prec()), db(R->eis.max_prec());
    for (auto& d : da) d = (uint32_t)(splitmix64(s) % 2);
    for (auto& d : db) d = (uint32_t)(splitmix64(s) % 2);
    RingElem a(R, EisElem(da, R->eis.max_prec()));
    RingElem b(R, EisElem(db, R->eis.max_prec()));
    for (auto _ : state) benchmark::DoNotOptimize(r_mul(a, b));
}
BENCHMARK(BM_EisMul)->Arg(12)->Arg(64)->Arg(256);

static void BM_EpMaster(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(ep_master(2, state.range(0)));
}
BENCHMARK(BM_EpMaster)->Arg(8)->Arg(16);

static void BM_PExpansion(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(p_witt_expansion(2, state.range(0)));
}
BENCHMARK(BM_PExpansion)->Arg(3)->Arg(5);

BENCHMARK_MAIN();

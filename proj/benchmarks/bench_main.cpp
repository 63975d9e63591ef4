#include <benchmark/benchmark.h>

#include "salem/compress.hpp"
#include "salem/dyadic.hpp"
#include "salem/spectral.hpp"
#include "salem/walks.hpp"

#include <map>

using namespace salem;

namespace {

Rational rat(long p, long q) { return Rational(BigInt(p), BigInt(q)); }

const AtomicMeasure& quarter_theta(int n) {
    static std::map<int, AtomicMeasure> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, n_approximation(cantor_flow({rat(1, 4), n}), n)).first;
    return it->second;
}

} // namespace

static void BM_cantor_flow(benchmark::State& state) {
    const int depth = int(state.range(0));
    for (auto _ : state) {
        TreeFlowMeasure flow = cantor_flow({rat(1, 4), depth});
        benchmark::DoNotOptimize(flow.max_depth());
    }
}
BENCHMARK(BM_cantor_flow)->Arg(10)->Arg(14)->Arg(18);

static void BM_range_mass(benchmark::State& state) {
    const TreeFlowMeasure flow = cantor_flow({rat(1, 4), 20});
    std::uint64_t j = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(flow.range_mass(20, j, j + 4096));
        j = (j + 1237) % ((std::uint64_t(1) << 20) - 4096);
    }
}
BENCHMARK(BM_range_mass);

static void BM_transform_at(benchmark::State& state) {
    const AtomicMeasure& theta = quarter_theta(int(state.range(0)));
    double u = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(transform_at(theta, u));
        u += 0.37;
    }
    state.SetItemsProcessed(std::int64_t(state.iterations()) *
                            std::int64_t(theta.size()));
}
BENCHMARK(BM_transform_at)->Arg(12)->Arg(16);

static void BM_build_ladder(benchmark::State& state) {
    const int n_max = int(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_ladder(seed++, 8, n_max));
    }
}
BENCHMARK(BM_build_ladder)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);

static void BM_walk_values(benchmark::State& state) {
    const WalkPath path = decode_code(sample_word(std::uint64_t(1) << 22, 3));
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(walk_value(path, t));
        t += 1e-7;
        if (t > 1.0) t = 0.0;
    }
}
BENCHMARK(BM_walk_values);

static void BM_deficiency_proxy(benchmark::State& state) {
    const PackedBits word = sample_word(std::uint64_t(1) << state.range(0), 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(deficiency_proxy(word));
    }
    state.SetBytesProcessed(std::int64_t(state.iterations()) *
                            std::int64_t(word.n / 8));
}
BENCHMARK(BM_deficiency_proxy)->Arg(14)->Arg(18);

BENCHMARK_MAIN();

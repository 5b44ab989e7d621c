// Serial reference kernels against their OpenMP versions. On a single core the
// pairs should be within overhead of each other.
#include <benchmark/benchmark.h>

#include "fpp/asymptotics.hpp"
#include "fpp/environment.hpp"
#include "fpp/particles.hpp"
#include "fpp/percolation.hpp"
#include "fpp/stats.hpp"

using namespace fpp;

namespace {

const WeightLaw kExp = WeightLaw::exponential(1.0);

void BM_env_serial(benchmark::State& st) {
    const int n = int(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(generate_environment_serial(ModelKind::swfpp(), kExp, n, n, 1));
    st.SetItemsProcessed(st.iterations() * n * n);
}
void BM_env_omp(benchmark::State& st) {
    const int n = int(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(generate_environment(ModelKind::swfpp(), kExp, n, n, 1));
    st.SetItemsProcessed(st.iterations() * n * n);
}

void BM_passage_serial(benchmark::State& st) {
    const int n = int(st.range(0));
    const Environment e = generate_environment(ModelKind::general(kExp), kExp, n, n, 2);
    for (auto _ : st) benchmark::DoNotOptimize(passage_field(e, {0, 0}));
    st.SetItemsProcessed(st.iterations() * n * n);
}
void BM_passage_tiled(benchmark::State& st) {
    const int n = int(st.range(0));
    const Environment e = generate_environment(ModelKind::general(kExp), kExp, n, n, 2);
    for (auto _ : st) benchmark::DoNotOptimize(passage_field_parallel(e, {0, 0}));
    st.SetItemsProcessed(st.iterations() * n * n);
}

ParticleConfig packed(size_t n) {
    ParticleConfig c;
    for (size_t i = 0; i < n; ++i) c.eta.push_back(double(i));
    return c;
}
Window jumps(size_t n) {
    RngStream rng(3);
    Window w{std::vector<double>(n)};
    for (auto& v : w.values) v = kExp.sample(rng);
    return w;
}

void BM_tasep_serial(benchmark::State& st) {
    const size_t n = size_t(st.range(0));
    const ParticleConfig c = packed(n);
    const Window W = jumps(n);
    for (auto _ : st) benchmark::DoNotOptimize(parallel_step(c, W));
    st.SetItemsProcessed(st.iterations() * int64_t(n));
}
void BM_tasep_omp(benchmark::State& st) {
    const size_t n = size_t(st.range(0));
    const ParticleConfig c = packed(n);
    const Window W = jumps(n);
    for (auto _ : st) benchmark::DoNotOptimize(parallel_step_omp(c, W));
    st.SetItemsProcessed(st.iterations() * int64_t(n));
}

void replicas(benchmark::State& st, bool parallel) {
    const WalkParams w = step_probabilities(1.0);
    for (auto _ : st) {
        auto v = run_replicas<double>(
            size_t(st.range(0)), 4,
            [&](size_t, RngStream& rng) {
                return double(sample_sigma_censored(w, rng, SigmaReading::Literal, 1000).value);
            },
            parallel);
        benchmark::DoNotOptimize(v);
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
void BM_replicas_serial(benchmark::State& st) { replicas(st, false); }
void BM_replicas_omp(benchmark::State& st) { replicas(st, true); }

}  // namespace

BENCHMARK(BM_env_serial)->Arg(256)->Arg(1024);
BENCHMARK(BM_env_omp)->Arg(256)->Arg(1024);
BENCHMARK(BM_passage_serial)->Arg(256)->Arg(1024);
BENCHMARK(BM_passage_tiled)->Arg(256)->Arg(1024);
BENCHMARK(BM_tasep_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_tasep_omp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_replicas_serial)->Arg(10000);
BENCHMARK(BM_replicas_omp)->Arg(10000);

BENCHMARK_MAIN();

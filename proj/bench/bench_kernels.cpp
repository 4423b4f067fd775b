// Serial versus OpenMP variants of the parallel kernels.
#include "mixhit/distance.hpp"
#include "mixhit/gallery.hpp"
#include "mixhit/parallel.hpp"
#include "mixhit/worst_set.hpp"

#include <benchmark/benchmark.h>

using namespace mixhit;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(1) ? "parallel" : "serial");
    state.counters["threads"] = state.range(1) ? max_threads() : 1;
}

void BM_PropagateRows(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    HeatKernel hk(random_weights(n, 1, 0.3));
    Matrix starts = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (auto _ : state) benchmark::DoNotOptimize(propagate_rows(hk, starts, hk.t_rel(), exec_of(state)));
    label(state);
}

void BM_WorstDistance(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    HeatKernel hk(random_tree(n, 2));
    for (auto _ : state) benchmark::DoNotOptimize(worst_distance_at(hk, hk.t_rel(), nullptr, exec_of(state)));
    label(state);
}

void BM_TMix(benchmark::State& state) {
    HeatKernel hk(aldous(static_cast<std::size_t>(state.range(0))).chain);
    for (auto _ : state) benchmark::DoNotOptimize(t_mix(hk, 0.25, exec_of(state)));
    label(state);
}

void BM_ExactWorstSet(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto chain = random_weights(n, 3, 0.5);
    auto mu = Distribution::point(n, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(worst_set_expectation(chain, mu, 0.5, SearchSpec::exact(exec_of(state))));
    label(state);
}

void BM_TailEnvelope(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto chain = random_weights(n, 4, 0.5);
    auto mu = Distribution::point(n, 0);
    const double trel = relaxation_time(decompose(chain));
    for (auto _ : state) {
        TailEnvelope env(chain, mu, 0.5, SearchSpec::exact(exec_of(state)), trel);
        benchmark::DoNotOptimize(env.hit(0.25));
    }
    label(state);
}

}  // namespace

BENCHMARK(BM_PropagateRows)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WorstDistance)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TMix)->ArgsProduct({{20, 50}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactWorstSet)->ArgsProduct({{12, 16}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TailEnvelope)->ArgsProduct({{10, 14}, {0, 1}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    apply_thread_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

#include "busched/busmodel.hpp"
#include "busched/configspace.hpp"
#include "busched/exact.hpp"
#include "busched/greedy.hpp"
#include "busched/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace busched;

namespace {

// Args: jobs, cores.
void BM_MaterializeSerial(benchmark::State& state) {
    auto inst = gen_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), OrderKind::Trivial, 1);
    auto space = enumerate_configurations(inst);
    for (auto _ : state) benchmark::DoNotOptimize(materialize_speed_table_serial(inst, space));
    state.counters["configs"] = static_cast<double>(space.size());
}

void BM_MaterializeParallel(benchmark::State& state) {
    auto inst = gen_instance(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), OrderKind::Trivial, 1);
    auto space = enumerate_configurations(inst);
    for (auto _ : state) benchmark::DoNotOptimize(materialize_speed_table(inst, space));
    state.counters["configs"] = static_cast<double>(space.size());
}

void BM_Greedy(benchmark::State& state) {
    auto inst = gen_instance(static_cast<int>(state.range(0)), 3, OrderKind::Random, 2);
    for (auto _ : state) benchmark::DoNotOptimize(greedy_schedule(inst));
}

void exact_bench(benchmark::State& state, bool parallel) {
    auto inst = gen_instance(static_cast<int>(state.range(0)), 2, OrderKind::OneToManyToOne, 3);
    ExactOptions opt;
    opt.parallel = parallel;
    std::uint64_t nodes = 0;
    for (auto _ : state) {
        auto r = exact_solve(inst, opt);
        nodes = r.nodes;
        benchmark::DoNotOptimize(r.makespan);
    }
    state.counters["nodes"] = static_cast<double>(nodes);
}

void BM_ExactSerial(benchmark::State& state) { exact_bench(state, false); }
void BM_ExactParallel(benchmark::State& state) { exact_bench(state, true); }

void BM_Simulate(benchmark::State& state) {
    auto inst = gen_instance(static_cast<int>(state.range(0)), 3, OrderKind::Random, 4);
    auto plan = greedy_schedule(inst);
    auto truth = GroundTruthModel::planning_model(inst, NoiseOptions{0.05, 9, false});
    for (auto _ : state) benchmark::DoNotOptimize(simulate(inst, plan, truth));
}

} // namespace

BENCHMARK(BM_MaterializeSerial)->Args({10, 3})->Args({14, 4})->Args({16, 5})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaterializeParallel)->Args({10, 3})->Args({14, 4})->Args({16, 5})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Greedy)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExactSerial)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactParallel)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Simulate)->Arg(8)->Arg(10)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "ivsel/harness.hpp"
#include "ivsel/model.hpp"
#include "ivsel/sampler.hpp"
#include "ivsel/scad.hpp"
#include "ivsel/simgen.hpp"

#include <map>

using namespace ivsel;

namespace {

struct Fixture {
    SimulatedData sim;
    HyperParams hyper;
    Vector theta0;

    explicit Fixture(Index p) {
        SimScenario sc;
        sc.p = p;
        sc.seed = 17;
        sim = generate(sc);
        hyper = HyperPolicy{}.resolve(sc.setup, sim.data);
        theta0 = scad_initializer(sim.data).theta;
    }
};

const Fixture& fixture(Index p) {
    static std::map<Index, Fixture> cache;
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, Fixture(p)).first;
    return it->second;
}

void BM_Sweep(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    const Sampler sampler(f.sim.data, f.hyper, f.sim.map);
    SamplerState state = sampler.init_state(f.theta0);
    ChainConfig config;
    Rng rng(1);
    for (auto _ : st) benchmark::DoNotOptimize(sampler.sweep(state, rng, config));
}
BENCHMARK(BM_Sweep)->Arg(50)->Arg(100)->Arg(200);

void BM_SingleFlipEvaluate(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    const Sampler sampler(f.sim.data, f.hyper, f.sim.map);
    const SamplerState state = sampler.init_state(f.theta0);
    Index j = 0;
    const Index p = f.sim.data.p();
    for (auto _ : st) {
        benchmark::DoNotOptimize(sampler.single_flip(state, j));
        j = (j + 1) % p;
    }
}
BENCHMARK(BM_SingleFlipEvaluate)->Arg(100)->Arg(200);

void BM_RefreshCaches(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    const Sampler sampler(f.sim.data, f.hyper, f.sim.map);
    SamplerState state = sampler.init_state(f.theta0);
    for (auto _ : st) benchmark::DoNotOptimize(sampler.refresh_caches(state));
}
BENCHMARK(BM_RefreshCaches)->Arg(100);

void BM_LogMarginalDelta(benchmark::State& st) {
    const Fixture& f = fixture(100);
    SparsityPattern delta(100);
    for (Index j = 0; j < st.range(0); ++j) delta.set(j, true);
    for (auto _ : st) benchmark::DoNotOptimize(log_marginal_delta(f.sim.data, delta, f.hyper, f.sim.map));
}
BENCHMARK(BM_LogMarginalDelta)->Arg(1)->Arg(5)->Arg(20);

void BM_ScadInitializer(benchmark::State& st) {
    const Fixture& f = fixture(100);
    for (auto _ : st) benchmark::DoNotOptimize(scad_initializer(f.sim.data));
}
BENCHMARK(BM_ScadInitializer)->Unit(benchmark::kMillisecond);

void BM_Replicate(benchmark::State& st) {
    ReplicationConfig c;
    c.replicates = 1;
    c.threads = 1;
    for (auto _ : st) benchmark::DoNotOptimize(run_replications(c));
}
BENCHMARK(BM_Replicate)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "snn/dataset.hpp"
#include "snn/expansion.hpp"
#include "snn/experiments.hpp"
#include "snn/kernels.hpp"
#include "snn/limit_ode.hpp"
#include "snn/trainer.hpp"

using namespace snn;

static void BM_Forward(benchmark::State& state) {
    const ScalingConfig cfg = ScalingConfig::two_layer(10, static_cast<int>(state.range(0)), 0.6, 0.75, 3);
    const Theta th = init_params(cfg, InitLaw::standard(), 1);
    const Eigen::Vector3d x(0.3, -0.2, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(forward(cfg, th, x).output());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Forward)->RangeMultiplier(4)->Range(256, 4096);

static void BM_SgdStepTwoLayer(benchmark::State& state) {
    const ScalingConfig cfg = ScalingConfig::two_layer(10, static_cast<int>(state.range(0)), 0.6, 0.75, 3);
    const RateSchedule r = rates_for(cfg);
    Theta th = init_params(cfg, InitLaw::standard(), 1);
    const Eigen::Vector3d x(0.3, -0.2, 0.9);
    for (auto _ : state) {
        th = sgd_step_two_layer(th, x, 0.5, r, cfg);
        benchmark::DoNotOptimize(th.C.data());
    }
}
BENCHMARK(BM_SgdStepTwoLayer)->RangeMultiplier(4)->Range(256, 4096);

static void BM_SgdStepBackprop(benchmark::State& state) {
    const ScalingConfig cfg = ScalingConfig::three_layer(10, 64, static_cast<int>(state.range(0)), 0.6, 0.75, 1.0, 3);
    const RateSchedule r = rates_for(cfg);
    Theta th = init_params(cfg, InitLaw::standard(), 1);
    const Eigen::Vector3d x(0.3, -0.2, 0.9);
    for (auto _ : state) {
        th = sgd_step(th, x, 0.5, r, cfg);
        benchmark::DoNotOptimize(th.C.data());
    }
}
BENCHMARK(BM_SgdStepBackprop)->RangeMultiplier(4)->Range(64, 1024);

static void BM_TrainUnitTime(benchmark::State& state) {
    const DefaultProblem dp;
    const Dataset ds = dp.dataset();
    TrainConfig c;
    c.scaling = dp.scaling(static_cast<int>(state.range(0)), 0.75);
    c.rates = rates_for(c.scaling);
    c.T = 1.0;
    c.stride = static_cast<int>(state.range(0));
    const Theta th = init_params(c.scaling, dp.law(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(train(c, ds, th).h.back().data());
}
BENCHMARK(BM_TrainUnitTime)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_KernelTables(benchmark::State& state) {
    DefaultProblem dp;
    dp.N1 = static_cast<int>(state.range(0));
    const Dataset ds = dp.dataset();
    const InitLaw law = dp.law();
    const auto space = ParticleSpace::create(dp.N1, dp.d, dp.gamma1);
    for (auto _ : state) benchmark::DoNotOptimize(kernel_B(ds.X, law, *space).B1.data());
}
BENCHMARK(BM_KernelTables)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_IntegrateH(benchmark::State& state) {
    const LimitProblem p = DefaultProblem().limit();
    const TimeGrid g = TimeGrid::make(1.0, 1e-3);
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), g).nodes().data());
}
BENCHMARK(BM_IntegrateH)->Unit(benchmark::kMicrosecond);

static void BM_ExpansionRecursion(benchmark::State& state) {
    DefaultProblem dp;
    dp.N1 = 4;
    dp.law_c = "discrete:-1/0.75,3/0.25";
    dp.law_w2 = "discrete:-1/0.75,3/0.25";
    const LimitProblem p = dp.limit();
    const TimeGrid g = TimeGrid::make(0.25, 1e-3);
    const StagedPath h = integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), g);
    const RegimeInfo r = classify_regime(state.range(0) == 2 ? 0.8 : 6.0 / 7.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(expansion_recursion(r, p, h, Eigen::VectorXd::Zero(p.M())).Q.back().data());
}
BENCHMARK(BM_ExpansionRecursion)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

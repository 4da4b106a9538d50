#include <benchmark/benchmark.h>

#include "tsobs/certify.hpp"
#include "tsobs/example.hpp"

using namespace tsobs;

namespace {

const TSModel& model() {
    static const TSModel m = snl_decompose(example::param_affine_model());
    return m;
}

const ObserverDesign& design() {
    static const ObserverDesign d = solve_design(model(), example::design_spec());
    return d;
}

void BM_Decompose(benchmark::State& state) {
    const ParamAffineModel pam = example::param_affine_model();
    for (auto _ : state) benchmark::DoNotOptimize(snl_decompose(pam));
}
BENCHMARK(BM_Decompose);

void BM_SolveDesign(benchmark::State& state) {
    DesignSpec spec = example::design_spec();
    spec.objective = static_cast<Objective>(state.range(0));
    if (spec.objective == Objective::MaxGamma) spec.theta_bar.reset();
    for (auto _ : state) benchmark::DoNotOptimize(solve_design(model(), spec));
}
BENCHMARK(BM_SolveDesign)
    ->Arg(static_cast<int>(Objective::MinBeta))
    ->Arg(static_cast<int>(Objective::MaxGamma))
    ->Arg(static_cast<int>(Objective::FeasibilityOnly))
    ->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(certify(model(), design()));
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMicrosecond);

void BM_Step(benchmark::State& state) {
    ObserverState s{(Vector(3) << 1.0, 0.5, 0.5).finished(), Vector::Zero(3), Vector::Zero(1)};
    const Vector theta = Vector::Constant(1, 0.5);
    const Vector u = Vector::Ones(1);
    const Vector rho = Vector::Ones(1);
    for (auto _ : state) {
        s = step(model(), design(), rho, s, theta, u, 1e-3);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_Step);

void BM_SimulateSeconds(benchmark::State& state) {
    SimScenario s = example::scenario();
    s.t_end = static_cast<double>(state.range(0));
    s.theta_profile = {{0.0, Vector::Constant(1, 0.5)}};
    for (auto _ : state) benchmark::DoNotOptimize(run(model(), design(), s));
    state.SetItemsProcessed(state.iterations() * s.step_count());
}
BENCHMARK(BM_SimulateSeconds)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

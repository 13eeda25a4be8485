#include <benchmark/benchmark.h>

#include "pbrbd/scenarios.hpp"

namespace {

using namespace pbrbd;

void step_scene(benchmark::State& state, ScenarioName name, SolverMode mode, bool parallel) {
    ScenarioSpec spec;
    spec.name = name;
    spec.n = static_cast<int>(state.range(0));
    spec.config.solver_mode = mode;
    spec.config.parallel = parallel;
    Scenario sc = build(spec);
    sc.scene.config.gs_schedule = GsSchedule::Batched;
    // settle past the first impacts so every iteration sees resting contacts
    for (int f = 0; f < 10; ++f) step(sc.scene);
    for (auto _ : state) {
        const StepReport r = step(sc.scene);
        benchmark::DoNotOptimize(r);
    }
    state.counters["bodies"] = static_cast<double>(sc.scene.bodies.size());
}

void pyramid_jacobi_serial(benchmark::State& s) { step_scene(s, ScenarioName::Pyramid, SolverMode::Jacobi, false); }
void pyramid_jacobi_parallel(benchmark::State& s) { step_scene(s, ScenarioName::Pyramid, SolverMode::Jacobi, true); }
void pyramid_gs_serial(benchmark::State& s) { step_scene(s, ScenarioName::Pyramid, SolverMode::GaussSeidel, false); }
void pyramid_gs_parallel(benchmark::State& s) { step_scene(s, ScenarioName::Pyramid, SolverMode::GaussSeidel, true); }
void pile_jacobi_serial(benchmark::State& s) { step_scene(s, ScenarioName::CapsulePile, SolverMode::Jacobi, false); }
void pile_jacobi_parallel(benchmark::State& s) { step_scene(s, ScenarioName::CapsulePile, SolverMode::Jacobi, true); }

} // namespace

BENCHMARK(pyramid_jacobi_serial)->Arg(140)->Arg(650)->Unit(benchmark::kMillisecond);
BENCHMARK(pyramid_jacobi_parallel)->Arg(140)->Arg(650)->Unit(benchmark::kMillisecond);
BENCHMARK(pyramid_gs_serial)->Arg(140)->Arg(650)->Unit(benchmark::kMillisecond);
BENCHMARK(pyramid_gs_parallel)->Arg(140)->Arg(650)->Unit(benchmark::kMillisecond);
BENCHMARK(pile_jacobi_serial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(pile_jacobi_parallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// Serial reference kernels against their OpenMP counterparts.
//
//   statgeo_bench --benchmark_filter=Gradient

#include <benchmark/benchmark.h>

#include <memory>

#include "statgeo/functional.hpp"
#include "statgeo/solver.hpp"
#include "statgeo/verify.hpp"

using namespace statgeo;

namespace {

ProblemInstance skewed_problem() {
    auto st = std::make_shared<const StationarySpacetime>(registry_get("minkowski_skewed"));
    Vec p(1), q(1);
    p << 0.0;
    q << 1.0;
    return ProblemInstance::make(st, p, 0.0, q, 2.5);
}

ProblemInstance disk_problem() {
    auto st = std::make_shared<const StationarySpacetime>(
        registry_get("excised_disk_static", {{"beta", std::string("1 + x2^2/10")}}));
    Vec p(2), q(2);
    p << 2.0, 0.0;
    q << 0.0, 2.5;
    return ProblemInstance::make(st, p, 0.0, q, 1.5);
}

SpatialPolyline bent_curve(const ProblemInstance& pi, int n) {
    SolveConfig cfg;
    cfg.segments = n;
    cfg.seeds.random_count = 1;
    return seed_curves(pi, cfg).at(1);
}

void GradientReference(benchmark::State& state) {
    const ProblemInstance pi = disk_problem();
    const SpatialPolyline x = bent_curve(pi, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::gradient(pi, x));
}

void GradientLocalSerial(benchmark::State& state) {
    const ProblemInstance pi = disk_problem();
    const SpatialPolyline x = bent_curve(pi, static_cast<int>(state.range(0)));
    const auto terms = segment_terms(pi, x);
    for (auto _ : state) benchmark::DoNotOptimize(gradient(pi, x, terms, false));
}

void GradientLocalParallel(benchmark::State& state) {
    const ProblemInstance pi = disk_problem();
    const SpatialPolyline x = bent_curve(pi, static_cast<int>(state.range(0)));
    const auto terms = segment_terms(pi, x);
    for (auto _ : state) benchmark::DoNotOptimize(gradient(pi, x, terms, true));
}

void ResidualReference(benchmark::State& state) {
    const ProblemInstance pi = disk_problem();
    const SpacetimePolyline z = time_reconstruction(pi, bent_curve(pi, static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(reference::geodesic_residuals(pi.st(), z));
}

void ResidualSerial(benchmark::State& state) {
    const ProblemInstance pi = disk_problem();
    const SpacetimePolyline z = time_reconstruction(pi, bent_curve(pi, static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(geodesic_residuals(pi.st(), z, false));
}

void ResidualParallel(benchmark::State& state) {
    const ProblemInstance pi = disk_problem();
    const SpacetimePolyline z = time_reconstruction(pi, bent_curve(pi, static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(geodesic_residuals(pi.st(), z, true));
}

// range(0) is the number of multistart workers; 1 is the serial baseline.
void Multistart(benchmark::State& state) {
    const ProblemInstance pi = skewed_problem();
    SolveConfig cfg;
    cfg.segments = 64;
    cfg.seeds.random_count = 7;
    cfg.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(multistart(pi, cfg));
}

}  // namespace

BENCHMARK(GradientReference)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(GradientLocalSerial)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);
BENCHMARK(GradientLocalParallel)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);
BENCHMARK(ResidualReference)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);
BENCHMARK(ResidualSerial)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);
BENCHMARK(ResidualParallel)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);
BENCHMARK(Multistart)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

// Serial reference path against OpenMP kernels for geometry and assembly.

#include <benchmark/benchmark.h>

#include "fdstokes/assembly.hpp"
#include "fdstokes/exact.hpp"

using namespace fdstokes;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(1) == 0 ? ExecPolicy::Serial : ExecPolicy::OpenMP;
}

void BM_CutGeometry(benchmark::State& state) {
  const BackgroundMesh mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CutGeometry cut(mesh, LevelSet{}, 8, policy_of(state));
    benchmark::DoNotOptimize(cut.fluid_area());
  }
}

void BM_AssembleTaylorHood(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Discretization disc(n, LevelSet{}, 8, 0.01, {2, 1, 1}, {}, policy_of(state));
  const ExactSolution exact;
  const VectorField f = [&](const Point& x) { return exact.f(x); };
  const VectorField g = [&](const Point& x) { return exact.u(x); };
  const auto config = MethodConfig::make(Variant::HR_TH, {2, 1, 1});
  for (auto _ : state) {
    const auto blocks = assemble_all(config, disc, f, g);
    benchmark::DoNotOptimize(blocks.stokes.K.nonZeros());
  }
}

void BM_AssembleP1BrezziPitkaranta(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Discretization disc(n, LevelSet{}, 8, 0.01, {1, 1, 1}, {}, policy_of(state));
  const ExactSolution exact;
  const VectorField f = [&](const Point& x) { return exact.f(x); };
  const VectorField g = [&](const Point& x) { return exact.u(x); };
  const auto config = MethodConfig::make(Variant::HR_BP, {1, 1, 1});
  for (auto _ : state) {
    const auto blocks = assemble_all(config, disc, f, g);
    benchmark::DoNotOptimize(blocks.stokes.K.nonZeros());
  }
}

}  // namespace

BENCHMARK(BM_CutGeometry)->ArgsProduct({{40, 160}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleTaylorHood)->ArgsProduct({{20, 80}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleP1BrezziPitkaranta)
    ->ArgsProduct({{20, 80}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cmath>

#include "thermalscatter/operators.hpp"
#include "thermalscatter/perturbation.hpp"

using namespace ts;

namespace {

SampledFunction profile(const GridPtr& g) {
  return SampledFunction::sample(g, [](double x) { return cplx(std::exp(-(x - 4.0) * (x - 4.0) / 4.0)); });
}

}  // namespace

static void BM_OperatorSetup(benchmark::State& state) {
  const auto g = build_grid(40.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ThermalOperator(g).symmetric_block().data());
}
BENCHMARK(BM_OperatorSetup)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_ApplyB(benchmark::State& state) {
  const auto g = build_grid(40.0, static_cast<int>(state.range(0)));
  const auto op = thermal_operator(g);
  const auto f = profile(g);
  for (auto _ : state) benchmark::DoNotOptimize(op->apply_B(f).values().data());
}
BENCHMARK(BM_ApplyB)->Arg(128)->Arg(512)->Arg(1024);

static void BM_ResolventKernelRoute(benchmark::State& state) {
  const auto g = build_grid(40.0, static_cast<int>(state.range(0)));
  const auto op = thermal_operator(g);
  const auto f = op->apply_B(profile(g));
  for (auto _ : state) benchmark::DoNotOptimize(op->apply_resolvent(cplx(0.0, 1.0), f).values().data());
}
BENCHMARK(BM_ResolventKernelRoute)->Arg(128)->Arg(512)->Arg(1024);

static void BM_ResolventConjugatedRoute(benchmark::State& state) {
  const auto g = build_grid(40.0, static_cast<int>(state.range(0)));
  const auto op = thermal_operator(g);
  const auto f = op->apply_B(profile(g));
  for (auto _ : state) benchmark::DoNotOptimize(op->apply_resolvent_conjugated(cplx(0.0, 1.0), f).values().data());
}
BENCHMARK(BM_ResolventConjugatedRoute)->Arg(128)->Arg(512)->Arg(1024);

static void BM_PerturbedResolvent(benchmark::State& state) {
  const auto g = build_grid(40.0, static_cast<int>(state.range(0)));
  const auto f = apply_B(profile(g));
  const auto w = PotentialSpec::power_family(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(apply_perturbed_resolvent(w, cplx(0.0, 1.0), f).values().data());
}
BENCHMARK(BM_PerturbedResolvent)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include "thermalscatter/domainlab.hpp"
#include "thermalscatter/dynamics.hpp"
#include "thermalscatter/operators.hpp"

using namespace ts;

static void BM_StrangStep(benchmark::State& state) {
  const auto g = build_grid(40.0, static_cast<int>(state.range(0)));
  const auto f = make_domain_sample(g, 0).psi;
  const auto w = PotentialSpec::power_family(1.0);
  thermal_operator(g)->polar_block();
  for (auto _ : state) benchmark::DoNotOptimize(perturbed_propagate(0.1, f, w, 1).values().data());
}
BENCHMARK(BM_StrangStep)->Arg(128)->Arg(512);

static void BM_ScatteringMatrix(benchmark::State& state) {
  const auto g = build_grid(40.0, static_cast<int>(state.range(0)));
  const auto basis = hermite_basis(g, 16);
  const auto w = PotentialSpec::power_family(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(scattering_matrix(w, basis).unitarity_defect);
}
BENCHMARK(BM_ScatteringMatrix)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond)->Iterations(2);

static void BM_DomainSample(benchmark::State& state) {
  const auto g = build_grid(40.0, 512);
  thermal_operator(g);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(make_domain_sample(g, seed++).norms.psi_l2);
}
BENCHMARK(BM_DomainSample);

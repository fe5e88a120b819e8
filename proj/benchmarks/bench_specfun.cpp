#include <benchmark/benchmark.h>

#include "thermalscatter/specfun.hpp"

namespace sf = ts::specfun;

static void BM_J0(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0)) / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(sf::bessel_j0(x));
}
BENCHMARK(BM_J0)->Arg(2)->Arg(40)->Arg(160);

static void BM_KelvinKer(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0)) / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(sf::kelvin(sf::Kelvin::ker, x));
}
BENCHMARK(BM_KelvinKer)->Arg(2)->Arg(40)->Arg(160);

static void BM_AmplitudeN0Scaled(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sf::amplitude_n0_scaled(x));
}
BENCHMARK(BM_AmplitudeN0Scaled)->Arg(1)->Arg(30)->Arg(1000);

static void BM_K0Ray(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sf::modified_bessel_ray(sf::RayFunction::K0, r, 0.7));
}
BENCHMARK(BM_K0Ray)->Arg(1)->Arg(12)->Arg(40);

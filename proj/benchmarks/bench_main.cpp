#include <benchmark/benchmark.h>

#include "qi/incompat.hpp"
#include "qi/linalg.hpp"
#include "qi/mub.hpp"
#include "qi/random.hpp"

namespace {

void BM_IncompatibilitySolve(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  qi::WeightedAssemblage a = qi::mub_assemblage(qi::build_mub(d, m), 0.95);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qi::incompatibility(a).value);
  }
}
BENCHMARK(BM_IncompatibilitySolve)->Args({2, 2})->Args({2, 3})->Args({3, 2})
    ->Unit(benchmark::kMillisecond);

void BM_MeasurementDiamondDistance(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  qi::Rng rng(7);
  qi::Povm m = qi::random_projective_povm(d, rng);
  qi::Povm n = qi::random_projective_povm(d, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qi::measurement_diamond_distance(m, n));
  }
}
BENCHMARK(BM_MeasurementDiamondDistance)->Arg(2)->Arg(3)
    ->Unit(benchmark::kMillisecond);

void BM_CriticalVisibility(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  qi::MubFamily fam = qi::build_mub(d, m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qi::white_noise_robustness(fam).eta_star);
  }
}
BENCHMARK(BM_CriticalVisibility)->Args({2, 3})->Args({3, 4})
    ->Unit(benchmark::kMillisecond);

void BM_Kron(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  qi::Rng rng(11);
  const qi::CMat a = qi::random_density_matrix(d, rng);
  const qi::CMat b = qi::random_density_matrix(d, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qi::kron(a, b));
  }
}
BENCHMARK(BM_Kron)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();

#include "kspec/kernels.hpp"
#include "kspec/spectral_solver.hpp"

#include <benchmark/benchmark.h>

using namespace kspec;

namespace {

SurfaceModel sphere_model(int l_max) {
  ModelDescriptor d;
  d.l_max = static_cast<int>(l_max);
  return SurfaceModel::build(d);
}

void BM_MassSerial(benchmark::State& state) {
  const SurfaceModel m = sphere_model(static_cast<int>(state.range(0)));
  const Eigen::VectorXd w = m.weights();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_gram_serial(m.basis_values(), w));
}

void BM_MassParallel(benchmark::State& state) {
  const SurfaceModel m = sphere_model(static_cast<int>(state.range(0)));
  const Eigen::VectorXd w = m.weights();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_gram(m.basis_values(), w));
}

void BM_HarmonicsSerial(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const SurfaceModel m = sphere_model(l);
  for (auto _ : state) benchmark::DoNotOptimize(detail::sphere_harmonics_serial(l, 1.0, m.nodes()));
}

void BM_HarmonicsParallel(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const SurfaceModel m = sphere_model(l);
  for (auto _ : state) benchmark::DoNotOptimize(detail::sphere_harmonics(l, 1.0, m.nodes()));
}

void BM_Spectrum(benchmark::State& state) {
  const SurfaceModel m = sphere_model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_spectrum(m, KahlerPotential::zero(m), m.basis_size()));
}

}  // namespace

BENCHMARK(BM_MassSerial)->Arg(8)->Arg(16);
BENCHMARK(BM_MassParallel)->Arg(8)->Arg(16);
BENCHMARK(BM_HarmonicsSerial)->Arg(8)->Arg(16);
BENCHMARK(BM_HarmonicsParallel)->Arg(8)->Arg(16);
BENCHMARK(BM_Spectrum)->Arg(8)->Arg(12);

BENCHMARK_MAIN();

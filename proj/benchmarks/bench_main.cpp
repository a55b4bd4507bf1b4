#include <benchmark/benchmark.h>

#include <random>

#include "qmeas/chm.hpp"
#include "qmeas/lindblad.hpp"
#include "qmeas/sse.hpp"

using namespace qmeas;

static Matrix random_generator(Index n, double scale) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> d(0.0, scale);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(d(gen), d(gen));
  return m;
}

static void BM_MatrixExponential(benchmark::State& state) {
  const Matrix m = random_generator(state.range(0), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exponential(m, 1.0));
}
BENCHMARK(BM_MatrixExponential)->Arg(2)->Arg(8)->Arg(32);

static void BM_SseStep(benchmark::State& state) {
  const MonitoringModel model(pauli_x(), pauli_z(), 0.5);
  QuantumState psi = QuantumState::basis(2, 0);
  for (auto _ : state) {
    psi = sse_step(model, psi, 0.01, 1e-3);
    benchmark::DoNotOptimize(psi);
  }
}
BENCHMARK(BM_SseStep);

static void BM_LindbladTwoLevel(benchmark::State& state) {
  const LindbladModel model(pauli_x(), pauli_z(), 0.5);
  const DensityMatrix rho0 = DensityMatrix::pure(QuantumState::basis(2, 0));
  const TimeGrid grid(0.0, 0.01, 200);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_lindblad(model, rho0, grid));
}
BENCHMARK(BM_LindbladTwoLevel);

static void BM_Ensemble(benchmark::State& state) {
  const MonitoringModel model(pauli_x(), pauli_z(), 0.5);
  const TimeGrid grid(0.0, 1e-3, 1000);
  const auto workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ensemble_average(model, QuantumState::basis(2, 0), grid, 64, 1, workers));
}
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Marginalize(benchmark::State& state) {
  const MonitoringModel model(pauli_x(), pauli_z(), 0.5);
  const DensityMatrix rho0 = DensityMatrix::pure(QuantumState::basis(2, 0));
  const TimeGrid grid(0.0, 0.01, 200);
  for (auto _ : state) benchmark::DoNotOptimize(marginalize_readouts(model, rho0, grid, 40));
}
BENCHMARK(BM_Marginalize);
BENCHMARK_MAIN();

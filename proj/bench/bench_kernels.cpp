// Serial reference against the OpenMP kernels.
#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qdgate/kernels.hpp"
#include "qdgate/readout.hpp"

using namespace qdgate;

namespace {

RecordSpectra make_record(std::size_t n) {
  std::vector<std::vector<double>> signals(4, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double t = -100.0 + 0.05 * static_cast<double>(k);
    for (std::size_t s = 0; s < signals.size(); ++s) {
      signals[s][k] = 0.5 * (1.0 + std::tanh(t / (5.0 + static_cast<double>(s))));
    }
  }
  return RecordSpectra(std::move(signals), -100.0, 0.05, 0.1);
}

std::vector<double> frequency_grid(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = 1e-3 + 2.0 * static_cast<double>(k) / static_cast<double>(n);
  return w;
}

void transform(benchmark::State& state, Execution mode) {
  const RecordSpectra rec = make_record(4000);
  const std::vector<double> w = frequency_grid(static_cast<std::size_t>(state.range(0)));
  std::vector<std::complex<double>> out;
  for (auto _ : state) {
    rec.transform(w, out, mode);
    benchmark::DoNotOptimize(out.data());
  }
}

void ordered_sine(benchmark::State& state, Execution mode) {
  const RecordSpectra rec = make_record(4000);
  const std::vector<double> w = frequency_grid(static_cast<std::size_t>(state.range(0)));
  const std::vector<std::pair<int, int>> pairs = {{0, 1}, {1, 0}, {2, 3}};
  std::vector<double> out;
  for (auto _ : state) {
    rec.ordered_sine(w, pairs, out, mode);
    benchmark::DoNotOptimize(out.data());
  }
}

void ensemble(benchmark::State& state, Execution mode) {
  ReadoutConfig cfg;
  for (auto _ : state) {
    auto records = simulate_ensemble(cfg, 1, static_cast<std::size_t>(state.range(0)), 1, mode);
    benchmark::DoNotOptimize(records.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(transform, serial, Execution::serial)->Arg(256);
BENCHMARK_CAPTURE(transform, parallel, Execution::parallel)->Arg(256);
BENCHMARK_CAPTURE(ordered_sine, serial, Execution::serial)->Arg(128);
BENCHMARK_CAPTURE(ordered_sine, parallel, Execution::parallel)->Arg(128);
BENCHMARK_CAPTURE(ensemble, serial, Execution::serial)->Arg(2000);
BENCHMARK_CAPTURE(ensemble, parallel, Execution::parallel)->Arg(2000);

BENCHMARK_MAIN();

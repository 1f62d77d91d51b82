// Copyright 2026 The qrclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "qrclab/experiments.hpp"

using namespace qrc;

static void BM_ReservoirStepPure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(1);
  const ReservoirConfig cfg(haar_unitary(Index{1} << n, rng));
  DensityMatrix rho = random_initial_state(n, rng);
  const ComplexVector psi = encode_amplitude(0.3);
  for (auto _ : state) {
    rho = reservoir_step_pure(cfg, rho, psi);
    benchmark::DoNotOptimize(rho.matrix().data());
  }
}
BENCHMARK(BM_ReservoirStepPure)->DenseRange(3, 8);

static void BM_ReservoirStepGeneral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(2);
  const ReservoirConfig cfg(haar_unitary(Index{1} << n, rng));
  DensityMatrix rho = random_initial_state(n, rng);
  const DensityMatrix in = encode_input(0.3);
  for (auto _ : state) {
    rho = reservoir_step(cfg, rho, in);
    benchmark::DoNotOptimize(rho.matrix().data());
  }
}
BENCHMARK(BM_ReservoirStepGeneral)->DenseRange(3, 8);

static void BM_HaarUnitary(benchmark::State& state) {
  RngStream rng(3);
  const Index dim = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(haar_unitary(dim, rng).matrix().data());
}
BENCHMARK(BM_HaarUnitary)->RangeMultiplier(2)->Range(8, 256);

static void BM_BlockHaarUnitary(benchmark::State& state) {
  RngStream rng(4);
  const auto d = SectorDecomposition::magnetization(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(block_haar_unitary(d, rng).matrix().data());
}
BENCHMARK(BM_BlockHaarUnitary)->DenseRange(3, 8);

static void BM_IsingBuild(benchmark::State& state) {
  IsingParams p;
  p.n_qubits = static_cast<int>(state.range(0));
  RngStream rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(build_ising(p, rng).unitary.matrix().data());
}
BENCHMARK(BM_IsingBuild)->DenseRange(3, 8);

BENCHMARK_MAIN();

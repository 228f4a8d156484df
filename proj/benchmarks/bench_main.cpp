// Copyright 2026 The Symile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include <benchmark/benchmark.h>

#include "symile/objectives.hpp"
#include "symile/rng.hpp"
#include "symile/traineval.hpp"

namespace symile {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = rng.uniform() - 0.5;
  return m;
}

std::vector<Matrix> random_reps(std::size_t m, std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> reps;
  for (std::size_t k = 0; k < m; ++k) reps.push_back(random_matrix(n, d, rng));
  return reps;
}

void BM_Mip(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto reps = random_reps(3, 1, d, 1);
  for (auto _ : state) benchmark::DoNotOptimize(mip({reps[0].row(0), reps[1].row(0), reps[2].row(0)}));
}
BENCHMARK(BM_Mip)->Arg(16)->Arg(256);

void BM_MatmulNt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const Matrix a = random_matrix(n, 16, rng);
  const Matrix b = random_matrix(n, 16, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matmul_nt(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * 16));
}
BENCHMARK(BM_MatmulNt)->Arg(128)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_SymileLossGrad(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto strategy = state.range(1) == 0 ? NegativeStrategy::on_permute : NegativeStrategy::on_squared;
  const auto reps = random_reps(3, n, 16, 3);
  Rng rng(4);
  const auto perms = draw_permutations(3, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(symile_loss_grad(reps, 0.74, strategy, perms));
}
BENCHMARK(BM_SymileLossGrad)->Args({128, 0})->Args({1000, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);

void BM_PairwiseClipLossGrad(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto reps = random_reps(3, n, 16, 5);
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_clip_loss_grad(reps, 0.74));
}
BENCHMARK(BM_PairwiseClipLossGrad)->Arg(128)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Classify5d(benchmark::State& state) {
  const Dataset d = gen_synth5d(1000, 1.0, 6);
  const ModelParams p = init_model({5, 5, 5}, 16, true, -0.3, 7);
  for (auto _ : state) benchmark::DoNotOptimize(classify_b_5d(p, ScorerKind::symile, d));
}
BENCHMARK(BM_Classify5d)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace symile

BENCHMARK_MAIN();

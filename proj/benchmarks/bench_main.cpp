/*
 * Copyright (c) 2026, The redunda authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "redunda/clustering.hpp"
#include "redunda/metric.hpp"
#include "redunda/random.hpp"
#include "redunda/selection.hpp"
#include "redunda/synth.hpp"

namespace {

struct Cloud {
  std::vector<std::vector<double>> vectors;
  std::vector<redunda::Point> points;
};

Cloud make_cloud(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(n * 131 + dim);
  std::normal_distribution<double> normal;
  Cloud c;
  c.vectors.assign(n, std::vector<double>(dim));
  for (auto& v : c.vectors)
    for (auto& x : v) x = normal(rng);
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({i, c.vectors[i]});
  return c;
}

redunda::EmbeddingDataset make_dataset(std::size_t classes, std::size_t per_class, std::size_t dim) {
  redunda::PlantedSpec spec;
  spec.classes = classes;
  spec.groups_per_class = per_class / 5;
  spec.group_sizes.assign(spec.groups_per_class, 5);
  spec.dim = dim;
  spec.spread = 1e-2;
  spec.margin = 0.3;
  spec.certify = false;
  return redunda::generate(spec).dataset;
}

redunda::EmbeddingDataset gaussian_dataset(std::size_t classes, std::size_t per_class, std::size_t dim) {
  std::mt19937_64 rng(classes * per_class + dim);
  std::normal_distribution<double> normal;
  std::vector<redunda::EmbeddingRecord> records;
  for (std::size_t i = 0; i < classes * per_class; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = normal(rng);
    records.push_back({i, static_cast<redunda::ClassId>(i % classes), std::move(v)});
  }
  return redunda::EmbeddingDataset(dim, std::move(records));
}

}  // namespace

static void BM_Pairwise(benchmark::State& state) {
  const auto cloud = make_cloud(state.range(0), state.range(1));
  std::vector<std::span<const double>> spans(cloud.vectors.begin(), cloud.vectors.end());
  for (auto _ : state) benchmark::DoNotOptimize(redunda::pairwise_dissimilarities(spans));
  const auto n = static_cast<std::int64_t>(state.range(0));
  state.SetItemsProcessed(state.iterations() * n * (n - 1) / 2);
}

static void BM_NNChain(benchmark::State& state) {
  const auto cloud = make_cloud(state.range(0), 64);
  const auto k = static_cast<std::size_t>(state.range(0)) / 10;
  for (auto _ : state) benchmark::DoNotOptimize(redunda::agglomerate_fast(cloud.points, k));
  state.SetComplexityN(state.range(0));
}

static void BM_Naive(benchmark::State& state) {
  const auto cloud = make_cloud(state.range(0), 64);
  const auto k = static_cast<std::size_t>(state.range(0)) / 10;
  for (auto _ : state) benchmark::DoNotOptimize(redunda::agglomerate_naive(cloud.points, k));
  state.SetComplexityN(state.range(0));
}

static void BM_ClusterSubset(benchmark::State& state) {
  const auto ds = make_dataset(4, 1000, 64);
  redunda::SelectionOptions options;
  options.jobs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(redunda::build_cluster_subset(ds, 0.9, options));
}

static void BM_RandomSubset(benchmark::State& state) {
  const auto ds = gaussian_dataset(10, 5000, 8);
  for (auto _ : state) benchmark::DoNotOptimize(redunda::build_random_subset(ds, 0.9, 7));
}

static void BM_Philox(benchmark::State& state) {
  redunda::PhiloxStream rng(1, 0, redunda::StreamPurpose::synthesis);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}

BENCHMARK(BM_Pairwise)
->Unit(benchmark::kMillisecond)
->Args({1000, 64})->Args({5000, 64})->Args({1300, 2048});

BENCHMARK(BM_NNChain)
->Unit(benchmark::kMillisecond)
->RangeMultiplier(2)->Range(256, 4096)
->Complexity(benchmark::oNSquared);

BENCHMARK(BM_Naive)
->Unit(benchmark::kMillisecond)
->RangeMultiplier(2)->Range(128, 512)
->Complexity(benchmark::oNCubed);

BENCHMARK(BM_ClusterSubset)
->UseRealTime()
->Unit(benchmark::kMillisecond)
->Arg(1)->Arg(4);

BENCHMARK(BM_RandomSubset)
->Unit(benchmark::kMillisecond);

BENCHMARK(BM_Philox);

BENCHMARK_MAIN();

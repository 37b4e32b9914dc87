// Copyright 2026 The poolrank Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Micro benchmarks for the hot paths of feature extraction and model fitting.

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "poolrank/eval.hpp"
#include "poolrank/geometry.hpp"
#include "poolrank/models.hpp"
#include "poolrank/parallel.hpp"
#include "poolrank/trees.hpp"

using namespace poolrank;

namespace {

// Logistic data with a few informative columns.
struct Data {
  Eigen::MatrixXd X;
  std::vector<int> y;
  std::vector<double> yd;
};

Data make_data(int n, int p) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Data d;
  d.X.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) d.X(i, j) = g(rng);
    const double eta = d.X(i, 0) - 0.7 * d.X(i, 1) + 0.5 * d.X(i, 2) - 1.0;
    d.y.push_back(u(rng) < 1 / (1 + std::exp(-eta)) ? 1 : 0);
    d.yd.push_back(d.y.back());
  }
  return d;
}

void BM_BufferIntersection(benchmark::State& state) {
  const auto buffer = geo::make_buffer({0, 0}, {350, static_cast<int>(state.range(0))});
  // A ring of irregular 12-gons straddling the buffer edge.
  std::vector<geo::Polygon> cells;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> jitter(80, 120);
  for (int k = 0; k < 64; ++k) {
    const double a = 2 * 3.141592653589793 * k / 64;
    const geo::PointXY c{350 * std::cos(a), 350 * std::sin(a)};
    geo::Ring r;
    for (int v = 0; v < 12; ++v) {
      const double b = 2 * 3.141592653589793 * v / 12;
      const double rad = jitter(rng);
      r.push_back({c.x + rad * std::cos(b), c.y + rad * std::sin(b)});
    }
    cells.emplace_back(std::move(r));
  }
  for (auto _ : state) {
    double total = 0;
    for (const auto& c : cells) total += geo::intersection_area(buffer, c);
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cells.size()));
}
BENCHMARK(BM_BufferIntersection)->Arg(32)->Arg(64)->Arg(128);

void BM_LassoPath(benchmark::State& state) {
  set_thread_count(1);
  const auto d = make_data(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto lambdas = models::LambdaGrid{}.values();
  for (auto _ : state) {
    auto path = models::fit_lr_path(d.X, d.y, lambdas);
    benchmark::DoNotOptimize(path.data());
  }
}
BENCHMARK(BM_LassoPath)->Args({1000, 50})->Args({1000, 150})->Unit(benchmark::kMillisecond);

void BM_RegressionTree(benchmark::State& state) {
  const auto d = make_data(static_cast<int>(state.range(0)), 100);
  std::vector<std::size_t> rows(d.yd.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  models::TreeParams params;
  params.min_leaf = 5;
  for (auto _ : state) {
    auto t = models::fit_tree(d.X, d.yd, rows, params);
    benchmark::DoNotOptimize(t.nodes.data());
  }
}
BENCHMARK(BM_RegressionTree)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Forest(benchmark::State& state) {
  set_thread_count(1);
  const auto d = make_data(1000, 100);
  models::ForestParams params;
  params.n_trees = 20;
  for (auto _ : state) {
    auto f = models::fit_forest(d.X, d.yd, params, 1);
    benchmark::DoNotOptimize(f.trees.data());
  }
}
BENCHMARK(BM_Forest)->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<int> y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = u(rng) < 0.25 ? 1 : 0;
    s[i] = std::round(100 * (u(rng) + 0.3 * y[i])) / 100;  // plenty of ties
  }
  for (auto _ : state) benchmark::DoNotOptimize(eval::auc(y, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(240)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();

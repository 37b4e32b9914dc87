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

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "poolrank/parallel.hpp"
#include "poolrank/random.hpp"

using namespace poolrank;

namespace {

TEST(Random, DerivedSeedsAreDistinctPerStreamAndIndex) {
  std::set<std::uint64_t> seen;
  for (auto s : {Stream::kSplit, Stream::kFolds, Stream::kForest, Stream::kBootstrap}) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(1, s, i));
  }
  EXPECT_EQ(seen.size(), 4000u);
  EXPECT_NE(derive_seed(1, Stream::kSplit, 0), derive_seed(2, Stream::kSplit, 0));
  static_assert(derive_seed(7, Stream::kSynth, 3) == derive_seed(7, Stream::kSynth, 3));
}

TEST(Random, UniformAndNormalMoments) {
  Rng rng(3);
  double s = 0, s2 = 0, n1 = 0, n2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
    const double z = standard_normal(rng);
    n1 += z;
    n2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n - 0.25, 1.0 / 12, 0.002);
  EXPECT_NEAR(n1 / n, 0.0, 0.01);
  EXPECT_NEAR(n2 / n, 1.0, 0.01);
}

TEST(Random, PoissonMean) {
  Rng rng(4);
  for (double mean : {0.5, 7.0, 900.0}) {
    double s = 0;
    for (int i = 0; i < 20000; ++i) s += static_cast<double>(poisson(rng, mean));
    EXPECT_NEAR(s / 20000, mean, 4 * std::sqrt(mean / 20000));
  }
}

TEST(Random, ShuffleIsAPermutation) {
  Rng rng(5);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
  shuffle(std::span<int>(v), rng);
  std::set<int> s(v.begin(), v.end());
  EXPECT_EQ(s.size(), 50u);
}

TEST(Parallel, EveryIndexOnceAndNestedCallsRun) {
  set_thread_count(4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, [&](std::size_t i) {
    hits[i]++;
    parallel_for(3, [&](std::size_t) {});
  });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  set_thread_count(0);
}

TEST(Parallel, RethrowsTheFirstException) {
  EXPECT_THROW(parallel_for(100,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace

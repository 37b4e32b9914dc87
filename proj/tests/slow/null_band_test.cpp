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

// With no planted signal the labels are pure noise, so a trained model's
// held-out AUC must sit near 0.5 over repeated splits.

#include <filesystem>

#include <gtest/gtest.h>

#include "poolrank/pipeline.hpp"
#include "poolrank/stats.hpp"

using namespace poolrank;
namespace fs = std::filesystem;

namespace {

TEST(NullSignal, EnsembleAucStaysInTheChanceBand) {
  const auto dir = fs::temp_directory_path() / "poolrank_null_band";
  fs::remove_all(dir);
  auto spec = synth::small_scenario();
  spec.seed = 17;
  spec.n_planted = 0;
  spec.forced_predictors.clear();
  const auto sc = pipeline::run_synth(spec, dir);
  ASSERT_TRUE(sc.truth.predictors.empty());

  auto config = pipeline::RunConfig::load(dir / "config.json");
  config.n_splits = 100;
  pipeline::run_extract(config);
  const auto results = pipeline::run_evaluate(config);
  ASSERT_EQ(results.size(), 1u);
  const auto aucs = results[0].aucs();
  ASSERT_EQ(aucs.size(), 100u);
  const double m = results[0].mean_auc();
  EXPECT_GE(m, 0.4);
  EXPECT_LE(m, 0.6);
  // Most individual splits are inside the band as well.
  std::size_t inside = 0;
  for (double a : aucs) inside += (a >= 0.4 && a <= 0.6) ? 1 : 0;
  EXPECT_GE(inside, 80u) << "mean " << m;
  fs::remove_all(dir);
}

}  // namespace

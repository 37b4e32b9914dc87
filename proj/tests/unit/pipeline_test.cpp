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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "poolrank/csv.hpp"
#include "poolrank/error.hpp"
#include "poolrank/pipeline.hpp"

using namespace poolrank;
using pipeline::RunConfig;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, DefaultsRoundTripThroughJson) {
  RunConfig c;
  EXPECT_EQ(c.buffer.radius, 350.0);
  EXPECT_EQ(c.labeling.z, 0.25);
  EXPECT_EQ(c.k, 10);
  EXPECT_EQ(c.n_splits, 100);
  EXPECT_EQ(c.n_resamples, 500);
  EXPECT_EQ(c.theta, 0.34);
  EXPECT_EQ(c.lambda_grid.count, 201);
  const auto th = c.thetas();
  ASSERT_EQ(th.size(), 100u);
  EXPECT_EQ(th[34], 0.34);
  c.seed = 99;
  c.method = "all";
  c.preprocess.grouping = features::CorrelationGrouping::kComponent;
  const auto back = RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.methods().size(), 3u);
}

TEST(Config, PartialDocumentsKeepDefaults) {
  const auto c = RunConfig::from_json(R"({"seed": 5, "buffer": {"radius": 200}})");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.buffer.radius, 200.0);
  EXPECT_EQ(c.buffer.n_segments, 64);
  EXPECT_THROW(RunConfig::from_json(R"({"sed": 5})"), InputError);
  EXPECT_THROW(RunConfig::from_json(R"({"buffer": {"radius": 200, "radios": 1}})"), InputError);
  EXPECT_THROW(RunConfig::from_json("[1]"), InputError);
  EXPECT_THROW(RunConfig::from_json("{"), InputError);
}

TEST(Config, OverridesByDottedKey) {
  RunConfig c;
  pipeline::apply_override(c, "buffer.radius", "150");
  pipeline::apply_override(c, "method", "rf");
  pipeline::apply_override(c, "bootstrap.scaling", "multiply_by_sd");
  EXPECT_EQ(c.buffer.radius, 150.0);
  EXPECT_EQ(c.method, "rf");
  EXPECT_EQ(c.scaling, eval::CoefficientScaling::kMultiplyBySd);
  EXPECT_THROW(pipeline::apply_override(c, "buffer.colour", "1"), InputError);
  EXPECT_THROW(pipeline::apply_override(c, "k", "ten"), InputError);
  c.method = "svm";
  EXPECT_THROW(c.validate(), InputError);
}

// One small scenario through every step, with the expensive protocol
// settings shrunk.
class SmallRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "poolrank_pipeline_test";
    fs::remove_all(dir_);
    pipeline::run_synth(synth::small_scenario(), dir_);
    config_ = new RunConfig(RunConfig::load(dir_ / "config.json"));
    config_->n_splits = 3;
    config_->n_resamples = 4;
    summary_ = pipeline::run_extract(*config_);
    best_radius_ = pipeline::run_radius_sweep(*config_);
    pipeline::run_train(*config_);
    pipeline::run_evaluate(*config_);
    pipeline::run_rank(*config_);
    pipeline::run_bootstrap(*config_);
  }
  static void TearDownTestSuite() {
    delete config_;
    fs::remove_all(dir_);
  }
  static fs::path out() { return config_->paths.output_dir; }

  static inline fs::path dir_;
  static inline RunConfig* config_ = nullptr;
  static inline pipeline::ExtractSummary summary_;
  static inline double best_radius_ = 0;
};

TEST_F(SmallRun, ExtractionRecoversThePlantedPopularity) {
  EXPECT_EQ(summary_.n_pools, 300u);
  EXPECT_EQ(summary_.n_positive, 75u);
  const auto truth = synth::read_truth(dir_);
  const auto pools = ingest::read_pools(out() / "pools.csv");
  ASSERT_EQ(pools.pools.size(), truth.pool_ids.size());
  std::map<std::string, std::size_t> at;
  for (std::size_t i = 0; i < truth.pool_ids.size(); ++i) at[truth.pool_ids[i]] = i;
  for (std::size_t i = 0; i < pools.pools.size(); ++i) {
    const auto k = at.at(pools.pools[i].pool_id);
    EXPECT_EQ(pools.pools[i].indicators.popularity, truth.popularity[k]);
    EXPECT_EQ(pools.labels[i], truth.labels[k]);
  }
}

TEST_F(SmallRun, ArtifactsAreWritten) {
  for (auto f : {"pools.csv", "features.csv", "features_raw.csv", "feature_report.json", "run_config.json",
                 "radius_sweep.csv", "model_lr_l1.json", "eval_report.json", "roc_points.csv", "ranking.csv",
                 "coefficients.csv"}) {
    EXPECT_TRUE(fs::exists(out() / f)) << f;
  }
  const auto ds = pipeline::load_dataset(out());
  EXPECT_EQ(ds.X.cols(), static_cast<Eigen::Index>(summary_.n_predictors));
}

TEST_F(SmallRun, RadiusSweepMarksTheArgmax) {
  const auto t = csv::read(out() / "radius_sweep.csv");
  ASSERT_EQ(t.rows.size(), geo::kBufferRadii.size());
  double best_r2 = -1, best_r = 0;
  int marked = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double r2 = csv::to_double(t.rows[r][t.require("r2")], t, r);
    if (r2 > best_r2) {
      best_r2 = r2;
      best_r = csv::to_double(t.rows[r][t.require("radius_m")], t, r);
    }
    marked += t.rows[r][t.require("best")] == "1" ? 1 : 0;
  }
  EXPECT_EQ(marked, 1);
  EXPECT_EQ(best_r, best_radius_);
}

TEST_F(SmallRun, RankingIsSortedAndRerunsIdentically) {
  const auto first = slurp(out() / "ranking.csv");
  const auto t = csv::read(out() / "ranking.csv");
  ASSERT_EQ(t.rows.size(), 300u);
  const auto c_p = t.require("probability");
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    EXPECT_GE(csv::to_double(t.rows[r - 1][c_p], t, r - 1), csv::to_double(t.rows[r][c_p], t, r));
  }
  pipeline::run_rank(*config_);
  EXPECT_EQ(slurp(out() / "ranking.csv"), first);
}

TEST_F(SmallRun, RefusesModelsOfAnotherVersion) {
  const auto path = out() / "model_lr_l1.json";
  const auto original = slurp(path);
  auto doc = nlohmann::json::parse(original);
  doc["version"] = 999;
  std::ofstream(path, std::ios::binary) << doc.dump();
  EXPECT_THROW(pipeline::run_rank(*config_), InputError);
  std::ofstream(path, std::ios::binary) << original;
}

TEST_F(SmallRun, CliReportsMissingColumnWithExitCode2) {
  const auto bad = dir_ / "bad_stations.csv";
  std::ofstream(bad) << "id,lon,n_connectors,max_power_kw,rollout\nA,5,1,11,strategic\n";
  const auto err = dir_ / "stderr.txt";
  const std::string cmd = std::string("\"") + POOLRANK_CLI_PATH + "\" extract --config \"" +
                          (dir_ / "config.json").string() + "\" --stations \"" + bad.string() +
                          "\" --output-dir \"" + (dir_ / "bad_out").string() + "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(slurp(err).find("lat"), std::string::npos) << slurp(err);
}

}  // namespace

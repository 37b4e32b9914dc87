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

#pragma once

// Synthetic scenarios: GIS layers, charging stations and transactions with a
// planted sparse logistic ground truth. Everything is written in the same
// file formats the ingestion and extraction code reads, and the planted
// signal is defined on features produced by that code from those files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "poolrank/features.hpp"
#include "poolrank/geometry.hpp"
#include "poolrank/random.hpp"

namespace poolrank::synth {

struct ScenarioSpec {
  std::uint64_t seed = 1;
  double center_lon = 5.0;
  double center_lat = 52.1;
  double extent_km = 20.0;  // square side
  int n_city_centers = 4;

  int n_population_cells = 1500;
  int n_neighborhoods = 300;
  int n_land_use_cells = 1500;
  int n_road_nodes = 1500;
  int road_neighbors = 3;
  int pois_per_category = 150;
  double landscan_spacing_m = 500.0;

  int n_pools = 1200;
  double min_pool_spacing_m = 100.0;
  int n_rfids = 20000;
  int popularity_levels = 60;  // K: popularity spans roughly 1..K+1

  int n_planted = 10;
  double beta_min = 0.5;
  double beta_max = 1.0;
  double noise_sd = 1.0;
  double z = 0.25;
  //! Predictors preferred for planting when eligible.
  std::vector<std::string> forced_predictors = {"poi.food.density"};

  double buffer_radius_m = geo::kDefaultBufferRadius;
  int year = 2015;

  //! Throws InputError on non-positive counts or inconsistent settings.
  void validate() const;
};

//! The reference scenario used by the end-to-end acceptance check.
ScenarioSpec reference_scenario();
//! A small, fast scenario for tests and determinism checks.
ScenarioSpec small_scenario();

struct PlantedTruth {
  std::vector<std::string> pool_ids;
  std::vector<std::string> predictors;  // planted columns
  std::vector<double> beta;             // on 1/n-standardized columns
  std::vector<double> eta;              // noise-free linear score
  std::vector<double> noisy;            // eta + noise
  std::vector<double> oracle_score;     // logistic(eta)
  std::vector<int> popularity;
  std::vector<int> labels;
};

struct Scenario {
  ScenarioSpec spec;
  std::filesystem::path dir;
  PlantedTruth truth;
  std::size_t n_raw_predictors = 0;
  std::size_t n_predictors = 0;  // after pre-processing
};

//! Writes attributes.json, the layer GeoJSON files, stations.csv,
//! transactions.csv and truth.csv (pool_id, eta, noisy, oracle_score,
//! popularity, label, plus a planted-coefficient table in planted.csv).
Scenario generate_scenario(const ScenarioSpec& spec, const std::filesystem::path& dir);

//! Reads truth.csv / planted.csv back.
PlantedTruth read_truth(const std::filesystem::path& dir);

//! Chooses planted columns from a pre-processed feature matrix: forced
//! names first (always, when present), then the remaining columns in a
//! seeded random order. Other columns qualify when at least half their
//! values are distinct, |skewness| <= 2.5 and |r| < 0.3 with every column
//! already chosen. Forced predictors get a positive coefficient.
std::vector<std::size_t> choose_planted_columns(const features::FeatureMatrix& m, int count,
                                                const std::vector<std::string>& forced, Rng& rng);

//! Popularity from the rank of `noisy`: 1 + floor(K*rank/n), plus one for
//! the top round(z*n) rows, so the top group is strictly above the rest.
std::vector<int> popularity_from_scores(const std::vector<double>& noisy, double z, int levels);

}  // namespace poolrank::synth

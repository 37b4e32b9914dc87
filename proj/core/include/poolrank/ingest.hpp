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

// Charging stations and transactions: filtering, pool aggregation,
// performance indicators and top-tier labeling.

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poolrank/geometry.hpp"
#include "poolrank/timestamp.hpp"

namespace poolrank::ingest {

enum class Rollout { kStrategic, kDemandDriven };

std::string_view to_string(Rollout r);
Rollout parse_rollout(std::string_view s);

struct StationRecord {
  std::string id;
  double lon = 0.0;
  double lat = 0.0;
  geo::PointXY location;  // filled by project_stations
  int n_connectors = 1;
  double max_power_kw = 0.0;
  Rollout rollout = Rollout::kStrategic;
};

struct Transaction {
  std::string station_id;
  std::string rfid;
  Timestamp plug_in = 0;
  Timestamp plug_out = 0;
  double energy_kwh = 0.0;
  double charging_time_h = 0.0;

  double connection_h() const { return seconds_to_hours(plug_out - plug_in); }
  //! plug_out > plug_in, 0 <= charging_time <= connection time, energy >= 0.
  bool consistent() const;
};

//! Half-open observation window [start, end).
struct Period {
  Timestamp start = 0;
  Timestamp end = 0;

  double hours() const { return seconds_to_hours(end - start); }
  static Period calendar_year(int year);
};

enum class UseTimeBasis {
  kConnected,  // union of plug-in intervals / period
  kCharging,   // summed charging time / period, capped at 1
};

struct LabelingSpec {
  double z = 0.25;
  Period period = Period::calendar_year(2015);
  UseTimeBasis use_time_basis = UseTimeBasis::kConnected;

  void validate() const;
};

struct IndicatorSet {
  double energy_kwh = 0.0;
  double n_transactions = 0.0;
  double popularity = 0.0;
  double charging_time_h = 0.0;
  double charging_ratio = 0.0;
  double use_time_ratio = 0.0;
  double energy_ratio = 0.0;

  static constexpr std::array<std::string_view, 7> kNames = {
      "energy_kwh",     "n_transactions", "popularity",  "charging_time_h",
      "charging_ratio", "use_time_ratio", "energy_ratio"};
  double value(std::size_t i) const;
  //! Index into kNames; throws InputError for unknown names.
  static std::size_t index_of(std::string_view name);
};

struct PoolRecord {
  std::string pool_id;
  geo::PointXY location;  // centroid of member stations
  double lon = 0.0;
  double lat = 0.0;
  std::vector<std::string> station_ids;
  int n_connectors = 0;
  double max_power_kw = 0.0;
  Rollout rollout = Rollout::kStrategic;
  IndicatorSet indicators;
};

struct FilterReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::size_t outside_period = 0;
  std::size_t inconsistent = 0;
};

struct FilterResult {
  std::vector<Transaction> kept;
  FilterReport report;
};

//! Keeps transactions with period.start <= plug_in and plug_out <= period.end
//! that satisfy the transaction invariants; counts the rest.
FilterResult filter_transactions(std::span<const Transaction> raw, const Period& period);

//! Fills StationRecord::location from lon/lat.
void project_stations(std::span<StationRecord> stations, const geo::Projection& proj);

//! Single-linkage clustering of stations whose pairwise distance is strictly
//! below threshold_m. Pools are identified by their smallest member id and
//! returned sorted by pool id; the result does not depend on input order.
//! Throws InputError on duplicate station ids.
std::vector<PoolRecord> aggregate_pools(std::span<const StationRecord> stations,
                                        double threshold_m = 50.0);

//! Groups transactions by pool (same order as pools). Transactions whose
//! station is unknown are counted in *unassigned.
std::vector<std::vector<Transaction>> assign_transactions(std::span<const PoolRecord> pools,
                                                          std::span<const Transaction> txs,
                                                          std::size_t* unassigned = nullptr);

//! The seven indicators for one pool; transactions must already be filtered
//! to the period and to the pool's stations. Throws InputError on an empty
//! period.
IndicatorSet compute_indicators(const PoolRecord& pool, std::span<const Transaction> txs,
                                const LabelingSpec& spec);

//! Length of the union of [plug_in, plug_out) intervals, hours.
double union_hours(std::span<const Transaction> txs);

struct LabelResult {
  std::vector<int> labels;
  std::size_t n_positive = 0;
  std::vector<std::string> warnings;
};

//! Marks exactly round(z*n) of the highest values with 1. Ties at the
//! cutoff go to the lower index (callers pass rows in pool-id order).
LabelResult label_top(std::span<const double> values, double z);

// File formats ----------------------------------------------------------

//! stations.csv: id, lon, lat, n_connectors, max_power_kw, rollout
std::vector<StationRecord> read_stations(const std::filesystem::path& path);
void write_stations(const std::filesystem::path& path, std::span<const StationRecord> stations);

//! transactions.csv: station_id, rfid, plug_in, plug_out, energy_kwh, charging_time_h
std::vector<Transaction> read_transactions(const std::filesystem::path& path);
void write_transactions(const std::filesystem::path& path, std::span<const Transaction> txs);

//! pools.csv with location, attributes, all indicators and the label.
void write_pools(const std::filesystem::path& path, std::span<const PoolRecord> pools,
                 std::span<const int> labels);

struct PoolTable {
  std::vector<PoolRecord> pools;
  std::vector<int> labels;
};
PoolTable read_pools(const std::filesystem::path& path);

//! Reference latitude for the equirectangular projection: the center of
//! the stations' latitude range.
double reference_latitude(std::span<const StationRecord> stations);

}  // namespace poolrank::ingest

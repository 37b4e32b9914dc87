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

#include "poolrank/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "poolrank/csv.hpp"
#include "poolrank/error.hpp"

namespace poolrank::ingest {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string_view to_string(Rollout r) {
  return r == Rollout::kStrategic ? "strategic" : "demand_driven";
}

Rollout parse_rollout(std::string_view s) {
  if (s == "strategic") return Rollout::kStrategic;
  if (s == "demand_driven" || s == "demand-driven") return Rollout::kDemandDriven;
  throw InputError("unknown rollout '" + std::string(s) + "' (expected strategic or demand_driven)");
}

bool Transaction::consistent() const {
  if (!(plug_out > plug_in)) return false;
  if (!std::isfinite(energy_kwh) || energy_kwh < 0) return false;
  if (!std::isfinite(charging_time_h) || charging_time_h < 0) return false;
  return charging_time_h <= connection_h() + 1e-9;
}

Period Period::calendar_year(int year) {
  using namespace std::chrono;
  const auto start = sys_days(std::chrono::year{year} / January / 1).time_since_epoch().count();
  const auto end = sys_days(std::chrono::year{year + 1} / January / 1).time_since_epoch().count();
  return {static_cast<Timestamp>(start) * 86400, static_cast<Timestamp>(end) * 86400};
}

void LabelingSpec::validate() const {
  if (!(z > 0 && z < 1)) throw InputError("labeling fraction z must lie in (0, 1)");
  if (!(period.end > period.start)) throw InputError("observation period has zero length");
}

double IndicatorSet::value(std::size_t i) const {
  switch (i) {
    case 0: return energy_kwh;
    case 1: return n_transactions;
    case 2: return popularity;
    case 3: return charging_time_h;
    case 4: return charging_ratio;
    case 5: return use_time_ratio;
    case 6: return energy_ratio;
    default: throw InputError("indicator index out of range");
  }
}

std::size_t IndicatorSet::index_of(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return i;
  }
  throw InputError("unknown indicator '" + std::string(name) + "'");
}

FilterResult filter_transactions(std::span<const Transaction> raw, const Period& period) {
  FilterResult r;
  r.report.input = raw.size();
  for (const auto& t : raw) {
    if (!t.consistent()) {
      ++r.report.inconsistent;
    } else if (t.plug_in < period.start || t.plug_out > period.end) {
      ++r.report.outside_period;
    } else {
      r.kept.push_back(t);
    }
  }
  r.report.kept = r.kept.size();
  return r;
}

void project_stations(std::span<StationRecord> stations, const geo::Projection& proj) {
  for (auto& s : stations) s.location = proj.forward(s.lon, s.lat);
}

double reference_latitude(std::span<const StationRecord> stations) {
  if (stations.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(stations.begin(), stations.end(),
                                      [](const auto& a, const auto& b) { return a.lat < b.lat; });
  return 0.5 * (lo->lat + hi->lat);
}

std::vector<PoolRecord> aggregate_pools(std::span<const StationRecord> stations,
                                        double threshold_m) {
  std::vector<const StationRecord*> sorted;
  sorted.reserve(stations.size());
  for (const auto& s : stations) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->id == sorted[i - 1]->id) {
      throw InputError("duplicate station id '" + sorted[i]->id + "'");
    }
  }

  const std::size_t n = sorted.size();
  DisjointSets sets(n);
  // Bucket by threshold-sized cells; linked stations are in adjacent cells.
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> cells;
  auto cell_of = [&](const geo::PointXY& p) {
    return std::pair{static_cast<long long>(std::floor(p.x / threshold_m)),
                     static_cast<long long>(std::floor(p.y / threshold_m))};
  };
  for (std::size_t i = 0; i < n; ++i) cells[cell_of(sorted[i]->location)].push_back(i);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(sorted[i]->location);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (std::size_t j : it->second) {
          if (j > i && geo::distance(sorted[i]->location, sorted[j]->location) < threshold_m) {
            sets.unite(i, j);
          }
        }
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);

  std::vector<PoolRecord> pools;
  pools.reserve(groups.size());
  for (const auto& [root, members] : groups) {
    PoolRecord p;
    p.pool_id = sorted[members.front()]->id;
    int strategic = 0;
    for (std::size_t m : members) {
      const auto& s = *sorted[m];
      p.station_ids.push_back(s.id);
      p.location.x += s.location.x;
      p.location.y += s.location.y;
      p.lon += s.lon;
      p.lat += s.lat;
      p.n_connectors += s.n_connectors;
      p.max_power_kw = std::max(p.max_power_kw, s.max_power_kw);
      strategic += s.rollout == Rollout::kStrategic ? 1 : -1;
    }
    const double k = static_cast<double>(members.size());
    p.location.x /= k;
    p.location.y /= k;
    p.lon /= k;
    p.lat /= k;
    p.rollout = strategic >= 0 ? Rollout::kStrategic : Rollout::kDemandDriven;
    pools.push_back(std::move(p));
  }
  std::sort(pools.begin(), pools.end(),
            [](const PoolRecord& a, const PoolRecord& b) { return a.pool_id < b.pool_id; });
  return pools;
}

std::vector<std::vector<Transaction>> assign_transactions(std::span<const PoolRecord> pools,
                                                          std::span<const Transaction> txs,
                                                          std::size_t* unassigned) {
  std::unordered_map<std::string, std::size_t> pool_of_station;
  for (std::size_t p = 0; p < pools.size(); ++p) {
    for (const auto& id : pools[p].station_ids) pool_of_station.emplace(id, p);
  }
  std::vector<std::vector<Transaction>> out(pools.size());
  std::size_t missing = 0;
  for (const auto& t : txs) {
    auto it = pool_of_station.find(t.station_id);
    if (it == pool_of_station.end()) {
      ++missing;
      continue;
    }
    out[it->second].push_back(t);
  }
  if (unassigned) *unassigned = missing;
  return out;
}

double union_hours(std::span<const Transaction> txs) {
  std::vector<std::pair<Timestamp, Timestamp>> iv;
  iv.reserve(txs.size());
  for (const auto& t : txs) iv.emplace_back(t.plug_in, t.plug_out);
  std::sort(iv.begin(), iv.end());
  std::int64_t total = 0;
  std::size_t i = 0;
  while (i < iv.size()) {
    Timestamp lo = iv[i].first, hi = iv[i].second;
    ++i;
    while (i < iv.size() && iv[i].first <= hi) {
      hi = std::max(hi, iv[i].second);
      ++i;
    }
    total += hi - lo;
  }
  return seconds_to_hours(total);
}

IndicatorSet compute_indicators(const PoolRecord& pool, std::span<const Transaction> txs,
                                const LabelingSpec& spec) {
  const double period_h = spec.period.hours();
  if (!(period_h > 0)) throw InputError("observation period has zero length");
  IndicatorSet ind;
  if (txs.empty()) return ind;
  double connected_h = 0.0;
  std::unordered_set<std::string_view> cards;
  for (const auto& t : txs) {
    ind.energy_kwh += t.energy_kwh;
    ind.charging_time_h += t.charging_time_h;
    connected_h += t.connection_h();
    cards.insert(t.rfid);
  }
  ind.n_transactions = static_cast<double>(txs.size());
  ind.popularity = static_cast<double>(cards.size());
  ind.charging_ratio = connected_h > 0 ? std::min(1.0, ind.charging_time_h / connected_h) : 0.0;
  if (spec.use_time_basis == UseTimeBasis::kConnected) {
    ind.use_time_ratio = std::min(1.0, union_hours(txs) / period_h);
  } else {
    ind.use_time_ratio = std::min(1.0, ind.charging_time_h / period_h);
  }
  ind.energy_ratio = pool.max_power_kw > 0 ? ind.energy_kwh / (pool.max_power_kw * period_h) : 0.0;
  return ind;
}

LabelResult label_top(std::span<const double> values, double z) {
  const std::size_t n = values.size();
  if (n < 2) throw InputError("label_top needs at least 2 values");
  if (!(z > 0 && z < 1)) throw InputError("labeling fraction z must lie in (0, 1)");
  LabelResult r;
  const auto k = static_cast<std::size_t>(std::llround(z * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  r.labels.assign(n, 0);
  for (std::size_t i = 0; i < k; ++i) r.labels[order[i]] = 1;
  r.n_positive = k;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    r.warnings.push_back("all values are equal; labels assigned by tie-break order only");
  } else if (k > 0 && k < n && values[order[k - 1]] == values[order[k]]) {
    r.warnings.push_back("tie at the labeling cutoff resolved by pool order");
  }
  return r;
}

std::vector<StationRecord> read_stations(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  const auto c_id = t.require("id"), c_lon = t.require("lon"), c_lat = t.require("lat"),
             c_conn = t.require("n_connectors"), c_pow = t.require("max_power_kw"),
             c_roll = t.require("rollout");
  std::vector<StationRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    StationRecord s;
    s.id = row[c_id];
    s.lon = csv::to_double(row[c_lon], t, r);
    s.lat = csv::to_double(row[c_lat], t, r);
    s.n_connectors = static_cast<int>(csv::to_int(row[c_conn], t, r));
    s.max_power_kw = csv::to_double(row[c_pow], t, r);
    const std::string at = path.string() + ":" + std::to_string(r + 2) + ": ";
    if (s.id.empty()) throw InputError(at + "empty station id");
    if (!std::isfinite(s.lon) || !std::isfinite(s.lat)) throw InputError(at + "missing coordinates");
    if (s.n_connectors < 1) throw InputError(at + "n_connectors must be >= 1");
    if (!(s.max_power_kw > 0)) throw InputError(at + "max_power_kw must be > 0");
    try {
      s.rollout = parse_rollout(row[c_roll]);
    } catch (const InputError& e) {
      throw InputError(at + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_stations(const std::filesystem::path& path, std::span<const StationRecord> stations) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"id", "lon", "lat", "n_connectors", "max_power_kw", "rollout"});
  for (const auto& s : stations) {
    w.row({s.id, csv::format_double(s.lon), csv::format_double(s.lat),
           std::to_string(s.n_connectors), csv::format_double(s.max_power_kw),
           std::string(to_string(s.rollout))});
  }
}

std::vector<Transaction> read_transactions(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  const auto c_st = t.require("station_id"), c_rfid = t.require("rfid"),
             c_in = t.require("plug_in"), c_out = t.require("plug_out"),
             c_e = t.require("energy_kwh"), c_ct = t.require("charging_time_h");
  std::vector<Transaction> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    Transaction x;
    x.station_id = row[c_st];
    x.rfid = row[c_rfid];
    try {
      x.plug_in = parse_rfc3339(row[c_in]);
      x.plug_out = parse_rfc3339(row[c_out]);
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(r + 2) + ": " + e.what());
    }
    x.energy_kwh = csv::to_double(row[c_e], t, r);
    x.charging_time_h = csv::to_double(row[c_ct], t, r);
    out.push_back(std::move(x));
  }
  return out;
}

void write_transactions(const std::filesystem::path& path, std::span<const Transaction> txs) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"station_id", "rfid", "plug_in", "plug_out", "energy_kwh", "charging_time_h"});
  for (const auto& t : txs) {
    w.row({t.station_id, t.rfid, format_rfc3339(t.plug_in), format_rfc3339(t.plug_out),
           csv::format_double(t.energy_kwh), csv::format_double(t.charging_time_h)});
  }
}

void write_pools(const std::filesystem::path& path, std::span<const PoolRecord> pools,
                 std::span<const int> labels) {
  if (labels.size() != pools.size()) throw InputError("write_pools: label count mismatch");
  auto out = open_out(path);
  csv::Writer w(out);
  std::vector<std::string> header = {"pool_id", "lon",          "lat",          "x",
                                     "y",       "station_ids",  "n_stations",   "n_connectors",
                                     "max_power_kw", "rollout"};
  for (auto name : IndicatorSet::kNames) header.emplace_back(name);
  header.emplace_back("label");
  w.row(header);
  for (std::size_t i = 0; i < pools.size(); ++i) {
    const auto& p = pools[i];
    std::string ids;
    for (const auto& s : p.station_ids) {
      if (!ids.empty()) ids += ';';
      ids += s;
    }
    std::vector<std::string> row = {p.pool_id,
                                    csv::format_double(p.lon),
                                    csv::format_double(p.lat),
                                    csv::format_double(p.location.x),
                                    csv::format_double(p.location.y),
                                    ids,
                                    std::to_string(p.station_ids.size()),
                                    std::to_string(p.n_connectors),
                                    csv::format_double(p.max_power_kw),
                                    std::string(to_string(p.rollout))};
    for (std::size_t k = 0; k < IndicatorSet::kNames.size(); ++k) {
      row.push_back(csv::format_double(p.indicators.value(k)));
    }
    row.push_back(std::to_string(labels[i]));
    w.row(row);
  }
}

PoolTable read_pools(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  PoolTable out;
  const auto c_id = t.require("pool_id"), c_lon = t.require("lon"), c_lat = t.require("lat"),
             c_x = t.require("x"), c_y = t.require("y"), c_ids = t.require("station_ids"),
             c_conn = t.require("n_connectors"), c_pow = t.require("max_power_kw"),
             c_roll = t.require("rollout"), c_label = t.require("label");
  std::array<std::size_t, IndicatorSet::kNames.size()> c_ind{};
  for (std::size_t k = 0; k < c_ind.size(); ++k) c_ind[k] = t.require(IndicatorSet::kNames[k]);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    PoolRecord p;
    p.pool_id = row[c_id];
    p.lon = csv::to_double(row[c_lon], t, r);
    p.lat = csv::to_double(row[c_lat], t, r);
    p.location = {csv::to_double(row[c_x], t, r), csv::to_double(row[c_y], t, r)};
    std::string_view ids = row[c_ids];
    while (!ids.empty()) {
      const auto semi = ids.find(';');
      p.station_ids.emplace_back(ids.substr(0, semi));
      if (semi == std::string_view::npos) break;
      ids.remove_prefix(semi + 1);
    }
    p.n_connectors = static_cast<int>(csv::to_int(row[c_conn], t, r));
    p.max_power_kw = csv::to_double(row[c_pow], t, r);
    p.rollout = parse_rollout(row[c_roll]);
    double* fields[] = {&p.indicators.energy_kwh,      &p.indicators.n_transactions,
                        &p.indicators.popularity,      &p.indicators.charging_time_h,
                        &p.indicators.charging_ratio,  &p.indicators.use_time_ratio,
                        &p.indicators.energy_ratio};
    for (std::size_t k = 0; k < c_ind.size(); ++k) *fields[k] = csv::to_double(row[c_ind[k]], t, r);
    const auto label = csv::to_int(row[c_label], t, r);
    if (label != 0 && label != 1) {
      throw InputError(path.string() + ":" + std::to_string(r + 2) + ": label must be 0 or 1");
    }
    out.pools.push_back(std::move(p));
    out.labels.push_back(static_cast<int>(label));
  }
  return out;
}

}  // namespace poolrank::ingest

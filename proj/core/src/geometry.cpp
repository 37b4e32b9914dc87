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

#include "poolrank/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "poolrank/error.hpp"

namespace poolrank::geo {

namespace {

double cross(PointXY o, PointXY a, PointXY b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Ring normalize_ring(Ring ring) {
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  while (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  for (const auto& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InputError("polygon ring has a non-finite coordinate");
    }
  }
  if (ring.size() < 3) throw InputError("polygon ring has fewer than 3 distinct vertices");
  return ring;
}

bool segments_cross(PointXY a, PointXY b, PointXY c, PointXY d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](PointXY p, PointXY q, PointXY r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
         (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
}

bool self_intersecting(const Ring& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    const PointXY a = r[i], b = r[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(a, b, r[j], r[(j + 1) % n])) return true;
    }
  }
  return false;
}

bool ring_convex(const Ring& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(r[i], r[(i + 1) % n], r[(i + 2) % n]) < 0) return false;
  }
  return true;
}

enum class Side { kOutside, kBoundary, kInside };

Side locate_in_ring(const Ring& ring, PointXY q) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const PointXY a = ring[j], b = ring[i];
    const double c = cross(a, b, q);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (std::abs(c) <= 1e-12 * (len * len + 1.0) &&
        std::min(a.x, b.x) - 1e-12 <= q.x && q.x <= std::max(a.x, b.x) + 1e-12 &&
        std::min(a.y, b.y) - 1e-12 <= q.y && q.y <= std::max(a.y, b.y) + 1e-12) {
      return Side::kBoundary;
    }
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x_at = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < x_at) inside = !inside;
    }
  }
  return inside ? Side::kInside : Side::kOutside;
}

// Sutherland-Hodgman clip of subject against a convex counter-clockwise clip
// ring. For a non-convex subject the output may contain zero-width bridges,
// which leave the shoelace area exact.
Ring clip_convex(const Ring& subject, const Ring& clip) {
  Ring out = subject;
  Ring in;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const PointXY c1 = clip[e], c2 = clip[(e + 1) % m];
    in.swap(out);
    out.clear();
    const std::size_t k = in.size();
    for (std::size_t i = 0; i < k; ++i) {
      const PointXY cur = in[i];
      const PointXY prev = in[(i + k - 1) % k];
      const double s_cur = cross(c1, c2, cur);
      const double s_prev = cross(c1, c2, prev);
      if (s_cur >= 0) {
        if (s_prev < 0) {
          const double t = s_prev / (s_prev - s_cur);
          out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
        }
        out.push_back(cur);
      } else if (s_prev >= 0) {
        const double t = s_prev / (s_prev - s_cur);
        out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
    }
  }
  return out;
}

// Ear clipping of a simple counter-clockwise ring.
std::vector<Ring> triangulate(const Ring& ring) {
  std::vector<Ring> tris;
  std::vector<PointXY> v = ring;
  std::size_t guard = 0;
  while (v.size() > 3 && guard < 4 * ring.size() * ring.size() + 16) {
    ++guard;
    const std::size_t n = v.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const PointXY a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
      const double turn = cross(a, b, c);
      if (turn == 0) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
        break;
      }
      if (turn < 0) continue;
      bool ear = true;
      for (std::size_t j = 0; j < n && ear; ++j) {
        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
        const PointXY p = v[j];
        if (p == a || p == b || p == c) continue;
        if (cross(a, b, p) >= 0 && cross(b, c, p) >= 0 && cross(c, a, p) >= 0) ear = false;
      }
      if (ear) {
        tris.push_back({a, b, c});
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
        break;
      }
    }
    if (!clipped) break;  // numerically stuck: fan the remainder
  }
  for (std::size_t i = 1; i + 1 < v.size(); ++i) tris.push_back({v[0], v[i], v[i + 1]});
  return tris;
}

Ring translated(const Ring& r, PointXY origin) {
  Ring out(r.size());
  std::transform(r.begin(), r.end(), out.begin(),
                 [&](PointXY p) { return PointXY{p.x - origin.x, p.y - origin.y}; });
  return out;
}

Ring reversed(const Ring& r) { return Ring(r.rbegin(), r.rend()); }

// Area of the intersection of two simple counter-clockwise rings.
double ring_intersection_area(const Ring& a, const Ring& b) {
  const BoundingBox ba = bounds(a), bb = bounds(b);
  if (!ba.intersects(bb)) return 0.0;
  const PointXY origin = ba.center();
  const Ring ta = translated(a, origin), tb = translated(b, origin);
  if (ring_convex(ta)) return std::abs(signed_area(clip_convex(tb, ta)));
  if (ring_convex(tb)) return std::abs(signed_area(clip_convex(ta, tb)));
  double total = 0.0;
  for (const Ring& tri : triangulate(ta)) total += std::abs(signed_area(clip_convex(tb, tri)));
  return total;
}

}  // namespace

BoundingBox bounds(std::span<const PointXY> pts) {
  BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

double signed_area(std::span<const PointXY> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Relative to the first vertex to limit cancellation at large offsets.
  const PointXY o = ring[0];
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) s += cross(o, ring[i], ring[i + 1]);
  return 0.5 * s;
}

Polygon::Polygon(Ring exterior, std::vector<Ring> holes) {
  exterior_ = normalize_ring(std::move(exterior));
  // Before the area test: a symmetric bow tie has zero signed area.
  if (self_intersecting(exterior_)) throw InputError("polygon exterior ring self-intersects");
  double a = signed_area(exterior_);
  if (a == 0.0) throw DegenerateError("polygon exterior ring has zero area");
  if (a < 0) {
    std::reverse(exterior_.begin(), exterior_.end());
    a = -a;
  }
  bbox_ = bounds(exterior_);
  area_ = a;
  for (auto& h : holes) {
    Ring ring = normalize_ring(std::move(h));
    if (self_intersecting(ring)) throw InputError("polygon hole self-intersects");
    double ha = signed_area(ring);
    if (ha == 0.0) throw DegenerateError("polygon hole has zero area");
    if (ha > 0) {
      std::reverse(ring.begin(), ring.end());
    }
    for (const auto& p : ring) {
      if (locate_in_ring(exterior_, p) == Side::kOutside) {
        throw InputError("polygon hole is not inside the exterior ring");
      }
    }
    area_ -= std::abs(ha);
    holes_.push_back(std::move(ring));
  }
  if (!(area_ > 0)) throw DegenerateError("polygon has non-positive area after holes");
  convex_ = ring_convex(exterior_);
}

Polyline::Polyline(std::vector<PointXY> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw InputError("polyline needs at least 2 vertices");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!std::isfinite(vertices_[i].x) || !std::isfinite(vertices_[i].y)) {
      throw InputError("polyline has a non-finite coordinate");
    }
    if (i > 0) length_ += distance(vertices_[i - 1], vertices_[i]);
  }
  if (!(length_ > 0)) throw InputError("polyline has zero length");
  bbox_ = bounds(vertices_);
}

void BufferSpec::validate() const {
  if (!(radius > 0) || !std::isfinite(radius)) throw InputError("buffer radius must be positive");
  if (n_segments < 16) throw InputError("buffer needs at least 16 segments");
}

double polygon_area(const Polygon& p) { return p.area(); }

Polygon make_buffer(PointXY center, const BufferSpec& spec) {
  spec.validate();
  const double n = spec.n_segments;
  const double two_pi = 2.0 * std::numbers::pi;
  const double scale = std::sqrt(two_pi / (n * std::sin(two_pi / n)));
  const double r = spec.radius * scale;
  Ring ring;
  ring.reserve(static_cast<std::size_t>(spec.n_segments));
  for (int k = 0; k < spec.n_segments; ++k) {
    const double t = two_pi * k / n;
    ring.push_back({center.x + r * std::cos(t), center.y + r * std::sin(t)});
  }
  return Polygon(std::move(ring));
}

double intersection_area(const Polygon& a, const Polygon& b) {
  if (!a.bbox().intersects(b.bbox())) return 0.0;
  double total = ring_intersection_area(a.exterior(), b.exterior());
  if (total == 0.0) return 0.0;
  std::vector<Ring> ha, hb;
  for (const auto& h : a.holes()) ha.push_back(reversed(h));
  for (const auto& h : b.holes()) hb.push_back(reversed(h));
  // A and B holes lie inside their exteriors and are pairwise disjoint, so
  // inclusion-exclusion over (hA & eB) u (eA & hB) is exact.
  for (const auto& h : ha) total -= ring_intersection_area(h, b.exterior());
  for (const auto& h : hb) total -= ring_intersection_area(a.exterior(), h);
  for (const auto& h1 : ha) {
    for (const auto& h2 : hb) total += ring_intersection_area(h1, h2);
  }
  return std::clamp(total, 0.0, std::min(a.area(), b.area()));
}

bool contains(const Polygon& p, PointXY q) {
  if (!p.bbox().contains(q)) return false;
  if (locate_in_ring(p.exterior(), q) == Side::kOutside) return false;
  for (const auto& h : p.holes()) {
    if (locate_in_ring(h, q) == Side::kInside) return false;
  }
  return true;
}

double polyline_length_within(const Polyline& line, const Polygon& region) {
  if (!line.bbox().intersects(region.bbox())) return 0.0;
  std::vector<const Ring*> rings{&region.exterior()};
  for (const auto& h : region.holes()) rings.push_back(&h);
  double total = 0.0;
  const auto& v = line.vertices();
  std::vector<double> ts;
  for (std::size_t s = 0; s + 1 < v.size(); ++s) {
    const PointXY p = v[s], q = v[s + 1];
    const double dx = q.x - p.x, dy = q.y - p.y;
    const double seg_len = std::hypot(dx, dy);
    if (seg_len == 0) continue;
    ts.assign({0.0, 1.0});
    for (const Ring* ring : rings) {
      const std::size_t n = ring->size();
      for (std::size_t i = 0; i < n; ++i) {
        const PointXY a = (*ring)[i], b = (*ring)[(i + 1) % n];
        const double ex = b.x - a.x, ey = b.y - a.y;
        const double denom = dx * ey - dy * ex;
        const double wx = a.x - p.x, wy = a.y - p.y;
        if (std::abs(denom) <= 1e-15 * seg_len * std::hypot(ex, ey)) {
          // Parallel: only collinear overlaps matter, add edge endpoints.
          if (std::abs(wx * dy - wy * dx) <= 1e-9 * seg_len * seg_len) {
            for (PointXY e : {a, b}) {
              const double t = ((e.x - p.x) * dx + (e.y - p.y) * dy) / (seg_len * seg_len);
              if (t > 0 && t < 1) ts.push_back(t);
            }
          }
          continue;
        }
        const double t = (wx * ey - wy * ex) / denom;
        const double u = (wx * dy - wy * dx) / denom;
        if (t > 0 && t < 1 && u >= 0 && u <= 1) ts.push_back(t);
      }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      const double t0 = ts[i], t1 = ts[i + 1];
      if (t1 <= t0) continue;
      const double tm = 0.5 * (t0 + t1);
      if (contains(region, {p.x + tm * dx, p.y + tm * dy})) total += (t1 - t0) * seg_len;
    }
  }
  return std::min(total, line.length());
}

double distance(PointXY a, PointXY b) { return std::hypot(a.x - b.x, a.y - b.y); }

double point_segment_distance(PointXY p, PointXY a, PointXY b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0) return distance(p, a);
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

double point_polyline_distance(PointXY p, const Polyline& line) {
  const auto& v = line.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    best = std::min(best, point_segment_distance(p, v[i], v[i + 1]));
  }
  return best;
}

double nearest_distance(PointXY from, std::span<const PointXY> targets) {
  if (targets.empty()) throw InputError("nearest_distance: empty target set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : targets) best = std::min(best, distance(from, t));
  return best;
}

double nearest_distance(PointXY from, std::span<const Polyline> targets) {
  if (targets.empty()) throw InputError("nearest_distance: empty target set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : targets) best = std::min(best, point_polyline_distance(from, t));
  return best;
}

PointXY Projection::forward(double lon_deg, double lat_deg) const {
  if (!(std::abs(lat_deg) < 90.0)) throw InputError("latitude must satisfy |lat| < 90");
  constexpr double kDeg = std::numbers::pi / 180.0;
  return {kEarthRadius * lon_deg * kDeg * std::cos(ref_lat_deg * kDeg),
          kEarthRadius * lat_deg * kDeg};
}

std::array<double, 2> Projection::inverse(PointXY p) const {
  constexpr double kDeg = std::numbers::pi / 180.0;
  return {p.x / (kEarthRadius * kDeg * std::cos(ref_lat_deg * kDeg)), p.y / (kEarthRadius * kDeg)};
}

PointXY project_lonlat(double lon_deg, double lat_deg, double ref_lat_deg) {
  return Projection{ref_lat_deg}.forward(lon_deg, lat_deg);
}

GridIndex::GridIndex(std::span<const BoundingBox> boxes, double cell_size)
    : boxes_(boxes.begin(), boxes.end()), cell_(cell_size) {
  if (boxes_.empty()) return;
  BoundingBox all = boxes_.front();
  for (const auto& b : boxes_) {
    all.min_x = std::min(all.min_x, b.min_x);
    all.min_y = std::min(all.min_y, b.min_y);
    all.max_x = std::max(all.max_x, b.max_x);
    all.max_y = std::max(all.max_y, b.max_y);
  }
  constexpr double kMaxCells = 512.0;
  cell_ = std::max({cell_, (all.max_x - all.min_x) / kMaxCells, (all.max_y - all.min_y) / kMaxCells,
                    1e-9});
  origin_x_ = all.min_x;
  origin_y_ = all.min_y;
  nx_ = static_cast<std::size_t>((all.max_x - all.min_x) / cell_) + 1;
  ny_ = static_cast<std::size_t>((all.max_y - all.min_y) / cell_) + 1;
  cells_.resize(nx_ * ny_);
  for (std::size_t id = 0; id < boxes_.size(); ++id) {
    const auto& b = boxes_[id];
    const auto x0 = static_cast<std::size_t>((b.min_x - origin_x_) / cell_);
    const auto x1 = std::min(nx_ - 1, static_cast<std::size_t>((b.max_x - origin_x_) / cell_));
    const auto y0 = static_cast<std::size_t>((b.min_y - origin_y_) / cell_);
    const auto y1 = std::min(ny_ - 1, static_cast<std::size_t>((b.max_y - origin_y_) / cell_));
    for (std::size_t y = y0; y <= y1; ++y) {
      for (std::size_t x = x0; x <= x1; ++x) cells_[y * nx_ + x].push_back(id);
    }
  }
}

std::vector<std::size_t> GridIndex::query(const BoundingBox& box) const {
  std::vector<std::size_t> out;
  if (boxes_.empty()) return out;
  auto clamp_index = [](double v, std::size_t n) -> std::size_t {
    if (v < 0) return 0;
    return std::min(n - 1, static_cast<std::size_t>(v));
  };
  if (box.max_x < origin_x_ || box.max_y < origin_y_) return out;
  const std::size_t x0 = clamp_index((box.min_x - origin_x_) / cell_, nx_);
  const std::size_t x1 = clamp_index((box.max_x - origin_x_) / cell_, nx_);
  const std::size_t y0 = clamp_index((box.min_y - origin_y_) / cell_, ny_);
  const std::size_t y1 = clamp_index((box.max_y - origin_y_) / cell_, ny_);
  for (std::size_t y = y0; y <= y1; ++y) {
    for (std::size_t x = x0; x <= x1; ++x) {
      for (std::size_t id : cells_[y * nx_ + x]) {
        if (boxes_[id].intersects(box)) out.push_back(id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace poolrank::geo

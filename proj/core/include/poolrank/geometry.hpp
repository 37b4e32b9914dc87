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

// Planar computational geometry in projected meters.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace poolrank::geo {

struct PointXY {
  double x = 0.0;  // easting, m
  double y = 0.0;  // northing, m

  friend bool operator==(const PointXY&, const PointXY&) = default;
};

using Ring = std::vector<PointXY>;

struct BoundingBox {
  double min_x, min_y, max_x, max_y;

  bool intersects(const BoundingBox& o) const noexcept {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
  bool contains(const PointXY& p) const noexcept {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  PointXY center() const noexcept { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }
};

BoundingBox bounds(std::span<const PointXY> pts);

//! A simple polygon with optional holes. Rings are stored open (first vertex
//! not repeated), the exterior counter-clockwise and holes clockwise.
class Polygon {
 public:
  //! Validates and normalizes: drops a repeated closing vertex and
  //! consecutive duplicates, fixes orientation, rejects rings with fewer
  //! than 3 distinct vertices, self-intersecting rings and holes that are
  //! not inside the exterior. Throws InputError.
  explicit Polygon(Ring exterior, std::vector<Ring> holes = {});

  const Ring& exterior() const noexcept { return exterior_; }
  const std::vector<Ring>& holes() const noexcept { return holes_; }
  const BoundingBox& bbox() const noexcept { return bbox_; }
  double area() const noexcept { return area_; }
  bool convex() const noexcept { return convex_ && holes_.empty(); }

 private:
  Ring exterior_;
  std::vector<Ring> holes_;
  BoundingBox bbox_{};
  double area_ = 0.0;
  bool convex_ = false;
};

class Polyline {
 public:
  //! Requires at least 2 vertices and positive length. Throws InputError.
  explicit Polyline(std::vector<PointXY> vertices);

  const std::vector<PointXY>& vertices() const noexcept { return vertices_; }
  const BoundingBox& bbox() const noexcept { return bbox_; }
  double length() const noexcept { return length_; }

 private:
  std::vector<PointXY> vertices_;
  BoundingBox bbox_{};
  double length_ = 0.0;
};

inline constexpr double kDefaultBufferRadius = 350.0;
inline constexpr std::array<double, 9> kBufferRadii = {100, 150, 200, 250, 300, 350, 400, 450, 500};

struct BufferSpec {
  double radius = kDefaultBufferRadius;  // m
  int n_segments = 64;

  //! Throws InputError unless radius > 0 and n_segments >= 16.
  void validate() const;
};

//! Signed shoelace area of an open ring (positive when counter-clockwise).
double signed_area(std::span<const PointXY> ring);

//! Exterior area minus hole areas.
double polygon_area(const Polygon& p);

//! Regular n-gon around center whose area equals pi*r^2: the circumradius is
//! inflated by sqrt(2*pi / (n*sin(2*pi/n))).
Polygon make_buffer(PointXY center, const BufferSpec& spec);

//! Area of the intersection of two polygons (holes respected). Symmetric,
//! in [0, min(area(a), area(b))].
double intersection_area(const Polygon& a, const Polygon& b);

//! Point-in-polygon with holes; boundary points count as inside.
bool contains(const Polygon& p, PointXY q);

//! Total length of the parts of line that lie inside region.
double polyline_length_within(const Polyline& line, const Polygon& region);

double distance(PointXY a, PointXY b);
double point_segment_distance(PointXY p, PointXY a, PointXY b);
double point_polyline_distance(PointXY p, const Polyline& line);

//! Minimum distance to any target; throws InputError if targets is empty.
double nearest_distance(PointXY from, std::span<const PointXY> targets);
double nearest_distance(PointXY from, std::span<const Polyline> targets);

//! Equirectangular projection: x = R*lon*cos(ref_lat), y = R*lat (radians).
struct Projection {
  static constexpr double kEarthRadius = 6371000.0;
  double ref_lat_deg = 0.0;

  //! Throws InputError when |lat| >= 90.
  PointXY forward(double lon_deg, double lat_deg) const;
  //! Inverse of forward: returns {lon, lat} in degrees.
  std::array<double, 2> inverse(PointXY p) const;
};

PointXY project_lonlat(double lon_deg, double lat_deg, double ref_lat_deg);

//! Uniform bounding-box grid over a set of boxes; query returns the ids of
//! boxes whose bbox intersects the query box, ascending and deduplicated.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(std::span<const BoundingBox> boxes, double cell_size);

  std::vector<std::size_t> query(const BoundingBox& box) const;
  std::size_t size() const noexcept { return boxes_.size(); }

 private:
  std::vector<BoundingBox> boxes_;
  double cell_ = 1.0;
  double origin_x_ = 0.0, origin_y_ = 0.0;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace poolrank::geo

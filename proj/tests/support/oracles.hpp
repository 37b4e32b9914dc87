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

// Reference implementations used only by the tests. Each one computes its
// quantity from the definition, by a route that shares no code with the
// library: brute-force counting, pairwise enumeration, exhaustive split
// search, dense Newton-Raphson and Monte-Carlo sampling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Classification --------------------------------------------------------------

struct Counts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Counts count_confusion(const std::vector<int>& y, const std::vector<double>& s, double theta) {
  Counts c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool predicted = s[i] >= theta;
    if (y[i] == 1) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

struct Metrics {
  double accuracy, precision, sensitivity, fall_out, f_score, mcc;
};

inline Metrics metrics_from_counts(const Counts& c) {
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  Metrics m{};
  m.accuracy = (tp + tn + fp + fn) > 0 ? (tp + tn) / (tp + fp + tn + fn) : 0.0;
  m.precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
  m.sensitivity = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
  m.fall_out = (fp + tn) > 0 ? fp / (fp + tn) : 0.0;
  // Harmonic mean of precision and sensitivity.
  m.f_score = (m.precision + m.sensitivity) > 0
                  ? 2.0 * m.sensitivity * m.precision / (m.sensitivity + m.precision)
                  : 0.0;
  const double d = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  m.mcc = d > 0 ? (tp * tn - fp * fn) / std::sqrt(d) : 0.0;
  return m;
}

//! Probability that a random positive outscores a random negative, ties
//! counting one half: O(P*N) enumeration.
inline double concordance(const std::vector<int>& y, const std::vector<double>& s) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) {
        wins += 1.0;
      } else if (s[i] == s[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(pairs);
}

// Logistic regression -----------------------------------------------------------

//! Unpenalized logistic regression with intercept by Newton-Raphson on the
//! raw columns. Returns [beta0, beta...].
inline Eigen::VectorXd newton_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y, int iterations = 100) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::MatrixXd A(n, p + 1);
  A.col(0).setOnes();
  A.rightCols(p) = X;
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv(i) = y[static_cast<std::size_t>(i)];
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd eta = A * b;
    Eigen::VectorXd mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = 1.0 / (1.0 + std::exp(-eta(i)));
      w(i) = mu(i) * (1.0 - mu(i));
    }
    const Eigen::VectorXd grad = A.transpose() * (yv - mu);
    const Eigen::MatrixXd H = A.transpose() * w.asDiagonal() * A;
    const Eigen::VectorXd step = H.ldlt().solve(grad);
    b += step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-14) break;
  }
  return b;
}

//! Columns centered and divided by their 1/n standard deviation.
inline Eigen::MatrixXd standardize(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd Z = X;
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double m = X.col(j).sum() / n;
    Z.col(j).array() -= m;
    const double sd = std::sqrt(Z.col(j).squaredNorm() / n);
    if (sd > 0) Z.col(j) /= sd;
  }
  return Z;
}

// Regression trees --------------------------------------------------------------

struct Node {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  std::size_t n = 0;
  std::unique_ptr<Node> left, right;
};

struct CartSettings {
  int min_leaf = 1;
  int max_splits = 1 << 30;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sse_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

struct Candidate {
  int feature;
  double threshold;
  double gain;
};

// Every (feature, cut between consecutive distinct values) in ascending
// order, scored by the two-pass SSE reduction.
inline std::vector<Candidate> all_candidates(const Eigen::MatrixXd& X, const std::vector<double>& y,
                                             const std::vector<std::size_t>& rows, int min_leaf) {
  std::vector<double> ys;
  for (auto r : rows) ys.push_back(y[r]);
  const double parent = sse_of(ys);
  std::vector<Candidate> out;
  for (int f = 0; f < X.cols(); ++f) {
    std::vector<double> xs;
    for (auto r : rows) xs.push_back(X(static_cast<Eigen::Index>(r), f));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      double thr = 0.5 * (xs[k] + xs[k + 1]);
      if (!(thr < xs[k + 1])) thr = xs[k];
      std::vector<double> l, r;
      for (auto row : rows) (X(static_cast<Eigen::Index>(row), f) <= thr ? l : r).push_back(y[row]);
      if (l.size() < static_cast<std::size_t>(min_leaf) || r.size() < static_cast<std::size_t>(min_leaf)) continue;
      out.push_back({f, thr, parent - sse_of(l) - sse_of(r)});
    }
  }
  return out;
}

}  // namespace detail

//! Exhaustive CART on squared error, grown breadth first. The chosen split
//! maximizes the SSE reduction; candidates within a relative 1e-9 of the
//! best count as tied and the first in (feature, threshold) order wins.
//! A split must reduce SSE by more than 1e-10 of the node's SSE.
inline std::unique_ptr<Node> exhaustive_cart(const Eigen::MatrixXd& X, const std::vector<double>& y,
                                             const std::vector<std::size_t>& rows, const CartSettings& s) {
  struct Pending {
    Node* node;
    std::vector<std::size_t> rows;
  };
  auto make = [&](const std::vector<std::size_t>& rs) {
    auto nd = std::make_unique<Node>();
    std::vector<double> ys;
    for (auto r : rs) ys.push_back(y[r]);
    nd->value = detail::mean_of(ys);
    nd->n = rs.size();
    return nd;
  };
  auto root = make(rows);
  std::vector<Pending> queue{{root.get(), rows}};
  int splits = 0;
  for (std::size_t head = 0; head < queue.size() && splits < s.max_splits; ++head) {
    const auto rs = queue[head].rows;
    Node* nd = queue[head].node;
    if (rs.size() < 2 * static_cast<std::size_t>(s.min_leaf)) continue;
    std::vector<double> ys;
    for (auto r : rs) ys.push_back(y[r]);
    const double sse = detail::sse_of(ys);
    if (!(sse > 0)) continue;
    const auto cands = detail::all_candidates(X, y, rs, s.min_leaf);
    double best = -1.0;
    for (const auto& c : cands) best = std::max(best, c.gain);
    if (!(best > 1e-10 * sse)) continue;
    const auto chosen = std::find_if(cands.begin(), cands.end(),
                                     [&](const detail::Candidate& c) { return c.gain >= best - 1e-9 * sse; });
    std::vector<std::size_t> l, r;
    for (auto row : rs) (X(static_cast<Eigen::Index>(row), chosen->feature) <= chosen->threshold ? l : r).push_back(row);
    nd->feature = chosen->feature;
    nd->threshold = chosen->threshold;
    nd->left = make(l);
    nd->right = make(r);
    queue.push_back({nd->left.get(), l});
    queue.push_back({nd->right.get(), r});
    ++splits;
  }
  return root;
}

// Geometry ----------------------------------------------------------------------

struct Pt {
  double x, y;
};

//! Crossing-number test against one closed ring.
inline bool inside_ring(const std::vector<Pt>& ring, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Pt a = ring[i], b = ring[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

struct Shape {
  std::vector<Pt> exterior;
  std::vector<std::vector<Pt>> holes;

  bool contains(double x, double y) const {
    if (!inside_ring(exterior, x, y)) return false;
    for (const auto& h : holes) {
      if (inside_ring(h, x, y)) return false;
    }
    return true;
  }
};

//! Star-shaped polygon around (cx, cy): m vertices at jittered angles (every
//! angular gap below 90 degrees) and radii in [r_min, r_max]. With a hole,
//! a square of half-side 0.3 r_min sits at the center, well inside the
//! kernel of the star.
inline Shape random_star(std::mt19937_64& rng, double cx, double cy, double r_min, double r_max, int m,
                         bool with_hole) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  Shape s;
  for (int k = 0; k < m; ++k) {
    const double a = (k + 0.8 * (u(rng) - 0.5)) * two_pi / m;
    const double r = r_min + (r_max - r_min) * u(rng);
    s.exterior.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  if (with_hole) {
    const double h = 0.3 * r_min;
    s.holes.push_back({{cx - h, cy - h}, {cx - h, cy + h}, {cx + h, cy + h}, {cx + h, cy - h}});
  }
  return s;
}

//! Monte-Carlo area of a AND b, sampling the overlap of their bounding
//! boxes. Returns {estimate, standard error}.
inline std::pair<double, double> monte_carlo_intersection(const Shape& a, const Shape& b, std::size_t samples,
                                                          std::mt19937_64& rng) {
  auto box = [](const Shape& s) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (auto p : s.exterior) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    return std::array<double, 4>{x0, y0, x1, y1};
  };
  const auto ba = box(a), bb = box(b);
  const double x0 = std::max(ba[0], bb[0]), y0 = std::max(ba[1], bb[1]);
  const double x1 = std::min(ba[2], bb[2]), y1 = std::min(ba[3], bb[3]);
  if (x1 <= x0 || y1 <= y0) return {0.0, 0.0};
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = ux(rng), y = uy(rng);
    if (a.contains(x, y) && b.contains(x, y)) ++hits;
  }
  const double box_area = (x1 - x0) * (y1 - y0);
  const double f = static_cast<double>(hits) / static_cast<double>(samples);
  return {f * box_area, box_area * std::sqrt(f * (1 - f) / static_cast<double>(samples))};
}

}  // namespace oracle

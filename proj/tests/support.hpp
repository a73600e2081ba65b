#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "geomflow/geometry.hpp"

namespace testing {

using geomflow::PolygonalCurve;
using geomflow::Vec2;

// Regular polygon with circumradius r, node 0 at angle phase, clockwise.
inline PolygonalCurve regular_polygon(std::size_t n, double r = 1.0, double phase = 0.0,
                                      Vec2 center = {}) {
  std::vector<Vec2> p(n);
  for (std::size_t j = 0; j < n; ++j) {
    double t = phase - 2.0 * std::numbers::pi * double(j) / double(n);
    p[j] = {center.x + r * std::cos(t), center.y + r * std::sin(t)};
  }
  return PolygonalCurve(std::move(p));
}

inline PolygonalCurve from_points(std::vector<Vec2> p) { return PolygonalCurve(std::move(p)); }

// Convex hull (monotone chain) of random points in a box.
inline PolygonalCurve random_convex(std::mt19937_64& rng, Vec2 center, double size, int points = 12) {
  std::uniform_real_distribution<double> u(-size, size);
  std::vector<Vec2> p;
  for (int i = 0; i < points; ++i) p.push_back({center.x + u(rng), center.y + u(rng)});
  std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Vec2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && geomflow::cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && geomflow::cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return PolygonalCurve(std::move(h));
}

// Star-shaped, generally nonconvex polygon.
inline PolygonalCurve random_star(std::mt19937_64& rng, Vec2 center, double size, int points = 24) {
  std::uniform_real_distribution<double> u(0.4, 1.0);
  std::vector<Vec2> p(points);
  for (int j = 0; j < points; ++j) {
    double t = 2.0 * std::numbers::pi * j / points;
    double r = size * u(rng);
    p[j] = {center.x + r * std::cos(t), center.y + r * std::sin(t)};
  }
  return PolygonalCurve(std::move(p));
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double len2 = geomflow::dot(d, d);
  double s = len2 > 0 ? std::clamp(geomflow::dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  return geomflow::norm(p - (a + s * d));
}

// Brute-force directed Hausdorff distance: each edge of a sampled with `per_edge`
// points, exact distance to every edge of b.
inline double brute_directed_hausdorff(const PolygonalCurve& a, const PolygonalCurve& b,
                                       int per_edge) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Vec2 p0 = a.node(std::ptrdiff_t(i) - 1), p1 = a[i];
    for (int k = 0; k <= per_edge; ++k) {
      Vec2 p = p0 + (double(k) / per_edge) * (p1 - p0);
      double best = INFINITY;
      for (std::size_t j = 0; j < b.size(); ++j)
        best = std::min(best, point_segment_distance(p, b.node(std::ptrdiff_t(j) - 1), b[j]));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

inline double max_node_distance(const PolygonalCurve& a, const PolygonalCurve& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, geomflow::norm(a[j] - b[j]));
  return d;
}

}  // namespace testing

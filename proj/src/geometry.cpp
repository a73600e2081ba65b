#include "geomflow/geometry.hpp"

#include <algorithm>
#include <string>

#include "geomflow/errors.hpp"

namespace geomflow {

DegenerateEdge::DegenerateEdge(std::size_t edge, double length, double threshold)
    : Error("degenerate edge " + std::to_string(edge) + ": length " + std::to_string(length) +
            " <= " + std::to_string(threshold)),
      edge_(edge) {}

SingularNormalMatrix::SingularNormalMatrix(double condition_estimate)
    : Error("normal matrix is numerically singular (condition estimate " +
            std::to_string(condition_estimate) + ")"),
      condition_(condition_estimate) {}

SingularSystem::SingularSystem(const std::string& what, double condition_estimate)
    : Error(what), condition_(condition_estimate) {}

WellPosednessViolation::WellPosednessViolation(int condition, const std::string& detail)
    : Error("well-posedness condition " + std::to_string(condition) + " violated: " + detail),
      condition_(condition) {}

namespace {

double perimeter_of(std::span<const Vec2> nodes) {
  double sum = 0.0;
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) sum += norm(nodes[i] - nodes[(i + n - 1) % n]);
  return sum;
}

}  // namespace

double degenerate_edge_threshold(std::span<const Vec2> nodes) {
  if (nodes.empty()) return 0.0;
  return kDegenerateEdgeFactor * perimeter_of(nodes) / static_cast<double>(nodes.size());
}

PolygonalCurve::PolygonalCurve(std::vector<Vec2> nodes, Orientation orientation)
    : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) {
    throw InvalidArgument("a closed polygon needs at least 3 nodes, got " +
                          std::to_string(nodes_.size()));
  }
  const double eps = degenerate_edge_threshold(nodes_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double len = norm(edge(i));
    if (!(len > eps)) throw DegenerateEdge(i, len, eps);
  }
  if (orientation == Orientation::Normalize && signed_area(nodes_) > 0.0) {
    std::reverse(nodes_.begin() + 1, nodes_.end());
  }
}

const Vec2& PolygonalCurve::node(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(nodes_.size());
  return nodes_[static_cast<std::size_t>(((i % n) + n) % n)];
}

Vec2 PolygonalCurve::edge(std::size_t i) const {
  const std::size_t n = nodes_.size();
  return nodes_[i] - nodes_[(i + n - 1) % n];
}

EdgeData edge_data(const PolygonalCurve& curve) {
  const std::size_t n = curve.size();
  EdgeData data;
  data.edge_vectors.resize(n);
  data.edge_lengths.resize(n);
  data.normals.resize(n);
  const double eps = degenerate_edge_threshold(curve.nodes());
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 h = curve.edge(j);
    const double len = norm(h);
    if (!(len > eps)) throw DegenerateEdge(j, len, eps);
    data.edge_vectors[j] = h;
    data.edge_lengths[j] = len;
    const Vec2 p = perp(h);
    data.normals[j] = {-p.x / len, -p.y / len};
  }
  return data;
}

double signed_area(std::span<const Vec2> nodes) {
  // Shoelace relative to the first node to limit cancellation.
  const std::size_t n = nodes.size();
  if (n < 3) return 0.0;
  const Vec2 o = nodes[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) twice += cross(nodes[i] - o, nodes[i + 1] - o);
  return 0.5 * twice;
}

double enclosed_area(const PolygonalCurve& curve) {
  return std::abs(signed_area(curve.nodes()));
}

double perimeter(const PolygonalCurve& curve) { return perimeter_of(curve.nodes()); }

double energy(const PolygonalCurve& curve) {
  double sum = 0.0;
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const Vec2 h = curve.edge(j);
    sum += dot(h, h);
  }
  return sum;
}

double mesh_ratio(const PolygonalCurve& curve) {
  const EdgeData data = edge_data(curve);
  const auto [lo, hi] = std::minmax_element(data.edge_lengths.begin(), data.edge_lengths.end());
  return *hi / *lo;
}

Vec2 centroid_of_vertices(const PolygonalCurve& curve) {
  Vec2 c;
  for (const Vec2& p : curve.nodes()) c += p;
  return (1.0 / static_cast<double>(curve.size())) * c;
}

PolygonalCurve translated(const PolygonalCurve& curve, Vec2 shift) {
  std::vector<Vec2> nodes = curve.nodes();
  for (Vec2& p : nodes) p += shift;
  return PolygonalCurve(std::move(nodes), Orientation::Keep);
}

PolygonalCurve scaled(const PolygonalCurve& curve, double factor) {
  std::vector<Vec2> nodes = curve.nodes();
  for (Vec2& p : nodes) p = factor * p;
  return PolygonalCurve(std::move(nodes), Orientation::Keep);
}

PolygonalCurve rigid_motion(const PolygonalCurve& curve, double angle, Vec2 shift) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<Vec2> nodes = curve.nodes();
  for (Vec2& p : nodes) p = Vec2{c * p.x - s * p.y, s * p.x + c * p.y} + shift;
  return PolygonalCurve(std::move(nodes), Orientation::Keep);
}

PolygonalCurve cyclic_shift(const PolygonalCurve& curve, std::size_t offset) {
  std::vector<Vec2> nodes = curve.nodes();
  std::rotate(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(offset % nodes.size()),
              nodes.end());
  return PolygonalCurve(std::move(nodes), Orientation::Keep);
}

}  // namespace geomflow

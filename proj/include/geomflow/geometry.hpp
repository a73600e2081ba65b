#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace geomflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator*(double s, const Vec2& a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(const Vec2& a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
/// Clockwise rotation by a quarter turn: (x, y) -> (y, -x).
inline Vec2 perp(const Vec2& a) { return {a.y, -a.x}; }

enum class Orientation {
  Normalize,  ///< reverse the node order if the polygon is counterclockwise
  Keep,       ///< take the node order as given
};

/// Closed planar polygon with periodic node indexing. Node i is joined to node
/// i+1 and node N-1 to node 0. Edge i runs from node i-1 to node i.
class PolygonalCurve {
 public:
  /// Throws InvalidArgument for N < 3 and DegenerateEdge when an edge is
  /// shorter than 1e-12 * perimeter / N. With Orientation::Normalize the nodes
  /// are reordered clockwise, keeping node 0 in place.
  explicit PolygonalCurve(std::vector<Vec2> nodes,
                          Orientation orientation = Orientation::Normalize);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<Vec2>& nodes() const noexcept { return nodes_; }
  const Vec2& operator[](std::size_t i) const { return nodes_[i]; }
  const Vec2& node(std::ptrdiff_t i) const;  // periodic

  /// Vector of edge i: x_i - x_{i-1}.
  Vec2 edge(std::size_t i) const;

  friend bool operator==(const PolygonalCurve&, const PolygonalCurve&) = default;

 private:
  std::vector<Vec2> nodes_;
};

struct EdgeData {
  std::vector<Vec2> edge_vectors;
  std::vector<double> edge_lengths;
  /// Outward unit normal -h^perp/|h| of each edge for clockwise curves.
  std::vector<Vec2> normals;
};

/// Relative threshold below which an edge counts as degenerate.
inline constexpr double kDegenerateEdgeFactor = 1e-12;

double degenerate_edge_threshold(std::span<const Vec2> nodes);

EdgeData edge_data(const PolygonalCurve& curve);

/// Signed shoelace area, positive for counterclockwise node order.
double signed_area(std::span<const Vec2> nodes);
double enclosed_area(const PolygonalCurve& curve);
double perimeter(const PolygonalCurve& curve);
/// Sum of squared edge lengths.
double energy(const PolygonalCurve& curve);
/// max |h_j| / min |h_j|.
double mesh_ratio(const PolygonalCurve& curve);

Vec2 centroid_of_vertices(const PolygonalCurve& curve);

PolygonalCurve translated(const PolygonalCurve& curve, Vec2 shift);
PolygonalCurve scaled(const PolygonalCurve& curve, double factor);
/// Rotation about the origin followed by a translation.
PolygonalCurve rigid_motion(const PolygonalCurve& curve, double angle, Vec2 shift);
/// Re-index so that the old node `offset` becomes node 0.
PolygonalCurve cyclic_shift(const PolygonalCurve& curve, std::size_t offset);

}  // namespace geomflow

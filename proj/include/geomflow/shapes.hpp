#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "geomflow/geometry.hpp"

namespace geomflow {

namespace shape {

struct Circle {
  double radius = 1.0;
};
struct Ellipse {
  double a = 2.0;  ///< semi-axis along x
  double b = 1.0;  ///< semi-axis along y
};
/// Rectangle of width rect_length with semicircular caps of the given radius.
struct Tube {
  double rect_length = 4.0;
  double radius = 0.5;
};
/// r(theta) = 2 + cos(6 theta).
struct Flower {};
/// x = cos(2 pi rho), y = sin(cos(2 pi rho)) + sin(2 pi rho) (0.7 + sin(2 pi rho) sin^2(6 pi rho)).
struct NonconvexBenchmark {};
/// User supplied closed curve over rho in [0, 1); must be smooth and simple.
struct Custom {
  std::string name;
  std::function<Vec2(double)> parametrization;
};

}  // namespace shape

using ShapeSpec = std::variant<shape::Circle, shape::Ellipse, shape::Tube, shape::Flower,
                               shape::NonconvexBenchmark, shape::Custom>;

/// Throws InvalidArgument when a parameter is not strictly positive or a custom
/// parametrization is missing.
void validate(const ShapeSpec& shape);

/// Short name ("circle", "ellipse", ...).
std::string shape_name(const ShapeSpec& shape);
/// Name plus parameters, usable as a file-name component.
std::string shape_key(const ShapeSpec& shape);

/// Point of the continuous curve at parameter rho (period 1). The Tube is
/// parametrized proportionally to arclength; the others use the formulas above.
Vec2 shape_point(const ShapeSpec& shape, double rho);

/// Perimeter of the continuous curve from the converged arclength table.
double shape_perimeter(const ShapeSpec& shape);

/// Polygon with N vertices on the continuous curve and (nearly) equal edges,
/// clockwise, node 0 at rho = 0. For the Tube the four arc junctions are
/// vertices and each arc is subdivided uniformly.
PolygonalCurve equidistributed_sample(const ShapeSpec& shape, std::size_t n);

/// Exact solution of curve-shortening flow from a circle: the circle of radius
/// sqrt(r0^2 - 2 t), sampled at the same angles as equidistributed_sample.
PolygonalCurve shrinking_circle(double initial_radius, double t, std::size_t n);

struct CatalogEntry {
  std::string name;
  std::string description;
  ShapeSpec spec;
};
std::vector<CatalogEntry> shape_catalog();

/// Lookup by short name, default parameters. Throws InvalidArgument.
ShapeSpec shape_from_name(const std::string& name);

}  // namespace geomflow

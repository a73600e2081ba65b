#pragma once

#include <string>

#include "geomflow/geometry.hpp"

namespace geomflow {

enum class MetricKind { L2, Linf, Manifold, Hausdorff };

std::string to_string(MetricKind kind);
/// Accepts l2, linf, manifold, hausdorff (case-insensitive). Throws InvalidArgument.
MetricKind parse_metric(const std::string& text);
/// Shape metrics do not depend on the parametrization.
bool is_shape_metric(MetricKind kind);

/// sqrt((1/N) sum_j |a_j - b_j|^2). Throws SizeMismatch.
double l2_error(const PolygonalCurve& a, const PolygonalCurve& b);
/// max_j |a_j - b_j|. Throws SizeMismatch.
double linf_error(const PolygonalCurve& a, const PolygonalCurve& b);

/// Area of the intersection of the regions enclosed by two simple polygons.
/// Throws ClippingFailure when the result is inconsistent.
double intersection_area(const PolygonalCurve& a, const PolygonalCurve& b);

/// Area of the symmetric difference |A| + |B| - 2 |A n B|.
double manifold_distance(const PolygonalCurve& a, const PolygonalCurve& b);

struct HausdorffOptions {
  /// Resolution of the edge subdivision; <= 0 selects the default
  /// 1e-3 * max(perimeter) / max(N_a, N_b).
  double resolution = 0.0;
};

double default_hausdorff_resolution(const PolygonalCurve& a, const PolygonalCurve& b);

/// sup over points p of a of the distance from p to b, up to the resolution.
double directed_hausdorff(const PolygonalCurve& a, const PolygonalCurve& b,
                          const HausdorffOptions& options = {});
double hausdorff_distance(const PolygonalCurve& a, const PolygonalCurve& b,
                          const HausdorffOptions& options = {});

double evaluate(MetricKind kind, const PolygonalCurve& a, const PolygonalCurve& b);

}  // namespace geomflow

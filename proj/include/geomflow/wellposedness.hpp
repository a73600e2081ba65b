#pragma once

#include <span>
#include <string>

#include "geomflow/geometry.hpp"

namespace geomflow {

/// Tolerance of the parallelism test: two edges count as non-parallel when
/// |h_i x h_j| > kParallelTolerance |h_i| |h_j|.
inline constexpr double kParallelTolerance = 1e-12;

struct WellPosednessReport {
  /// 0 when both conditions hold, otherwise the first violated one:
  /// 1 = edge vectors span a space of dimension < 2, 2 = degenerate vertex.
  int violated_condition = 0;
  std::string detail;

  bool ok() const { return violated_condition == 0; }
};

/// Checks the assumptions under which the BGN-type linear systems are uniquely
/// solvable. Works on raw nodes so that invalid polygons can be diagnosed.
WellPosednessReport check_wellposed(std::span<const Vec2> nodes);

}  // namespace geomflow

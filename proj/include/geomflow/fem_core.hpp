#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "geomflow/geometry.hpp"

namespace geomflow {

/// One real value per node of a curve (periodic indexing).
struct NodalField {
  Eigen::VectorXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
};

/// Scalar field that is either continuous piecewise linear (nodal values) or
/// constant on each edge (edge values, edge j = [node j-1, node j]).
struct PiecewiseField {
  enum class Kind { Nodal, EdgeConstant };
  Kind kind = Kind::Nodal;
  std::vector<double> values;

  static PiecewiseField nodal(std::vector<double> v) { return {Kind::Nodal, std::move(v)}; }
  static PiecewiseField nodal(const NodalField& f);
  static PiecewiseField edge_constant(std::vector<double> v) {
    return {Kind::EdgeConstant, std::move(v)};
  }
  static PiecewiseField constant(double c, std::size_t n) { return {Kind::Nodal, std::vector(n, c)}; }
};

/// Mass-lumped (trapezoidal) inner product over the curve:
///   1/2 sum_j |h_j| [ (u v)(rho_j^-) + (u v)(rho_{j-1}^+) ].
/// Throws SizeMismatch.
double lumped_inner(const PiecewiseField& u, const PiecewiseField& v, const PolygonalCurve& curve);

/// Matrices of the BGN-type schemes on one polygon, stored by structure.
///
/// mass:      diagonal of the lumped mass matrix, M_jj = (|h_j| + |h_{j+1}|)/2.
///            It doubles as the weight vector w of (., 1)^h.
/// normal:    the 2N x N normal coupling (phi_i, n^[k] phi_j)^h is diagonal in
///            each coordinate block; normal[j] holds the two diagonal entries
///            1/2 (|h_j| n_j + |h_{j+1}| n_{j+1}).
/// stiffness: cyclic tridiagonal (d_s phi_i, d_s phi_j); stiffness_diag[j] =
///            1/|h_j| + 1/|h_{j+1}| and stiffness_upper[j] = -1/|h_{j+1}|
///            couples nodes j and j+1.
struct AssembledOperators {
  Eigen::VectorXd mass;
  std::vector<Vec2> normal;
  Eigen::VectorXd stiffness_diag;
  Eigen::VectorXd stiffness_upper;

  std::size_t size() const { return static_cast<std::size_t>(mass.size()); }

  Eigen::VectorXd apply_stiffness(const Eigen::VectorXd& u) const;
  /// (Nmat kappa) as N points: one 2-vector per node.
  std::vector<Vec2> apply_normal(const Eigen::VectorXd& kappa) const;
  /// Nmat^T X for nodal positions X.
  Eigen::VectorXd apply_normal_transpose(std::span<const Vec2> positions) const;

  Eigen::SparseMatrix<double> stiffness_matrix() const;
  /// 2N x N with x-rows first, then y-rows.
  Eigen::SparseMatrix<double> normal_matrix() const;
};

/// Throws DegenerateEdge.
AssembledOperators assemble(const PolygonalCurve& curve);

/// Threshold on the condition estimate of Nmat^T Nmat.
inline constexpr double kNormalMatrixConditionLimit = 1e14;

/// kappa = (Nmat^T Nmat)^{-1} Nmat^T A X, the least-squares solution of
/// Nmat kappa = A X. Throws WellPosednessViolation or SingularNormalMatrix.
NodalField discrete_curvature(const PolygonalCurve& curve);

}  // namespace geomflow

#include "geomflow/fem_core.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "geomflow/errors.hpp"
#include "geomflow/wellposedness.hpp"

namespace geomflow {

PiecewiseField PiecewiseField::nodal(const NodalField& f) {
  return {Kind::Nodal, std::vector<double>(f.values.data(), f.values.data() + f.values.size())};
}

double lumped_inner(const PiecewiseField& u, const PiecewiseField& v, const PolygonalCurve& curve) {
  const std::size_t n = curve.size();
  if (u.values.size() != n || v.values.size() != n) {
    throw SizeMismatch("lumped_inner: field sizes " + std::to_string(u.values.size()) + ", " +
                       std::to_string(v.values.size()) + " do not match N=" + std::to_string(n));
  }
  // Edge j runs from node j-1 (rho_{j-1}^+) to node j (rho_j^-).
  auto at_end = [](const PiecewiseField& f, std::size_t j) { return f.values[j]; };
  auto at_start = [n](const PiecewiseField& f, std::size_t j) {
    return f.kind == PiecewiseField::Kind::Nodal ? f.values[(j + n - 1) % n] : f.values[j];
  };
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double len = norm(curve.edge(j));
    sum += len * (at_end(u, j) * at_end(v, j) + at_start(u, j) * at_start(v, j));
  }
  return 0.5 * sum;
}

AssembledOperators assemble(const PolygonalCurve& curve) {
  const EdgeData edges = edge_data(curve);
  const std::size_t n = curve.size();
  const auto ni = static_cast<Eigen::Index>(n);
  AssembledOperators ops;
  ops.mass.resize(ni);
  ops.normal.resize(n);
  ops.stiffness_diag.resize(ni);
  ops.stiffness_upper.resize(ni);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t next = (j + 1) % n;
    const double left = edges.edge_lengths[j];
    const double right = edges.edge_lengths[next];
    const auto jj = static_cast<Eigen::Index>(j);
    ops.mass[jj] = 0.5 * (left + right);
    ops.normal[j] = 0.5 * (left * edges.normals[j] + right * edges.normals[next]);
    ops.stiffness_diag[jj] = 1.0 / left + 1.0 / right;
    ops.stiffness_upper[jj] = -1.0 / right;
  }
  return ops;
}

Eigen::VectorXd AssembledOperators::apply_stiffness(const Eigen::VectorXd& u) const {
  const Eigen::Index n = mass.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index prev = (j + n - 1) % n;
    const Eigen::Index next = (j + 1) % n;
    out[j] = stiffness_diag[j] * u[j] + stiffness_upper[prev] * u[prev] +
             stiffness_upper[j] * u[next];
  }
  return out;
}

std::vector<Vec2> AssembledOperators::apply_normal(const Eigen::VectorXd& kappa) const {
  std::vector<Vec2> out(normal.size());
  for (std::size_t j = 0; j < normal.size(); ++j) {
    out[j] = kappa[static_cast<Eigen::Index>(j)] * normal[j];
  }
  return out;
}

Eigen::VectorXd AssembledOperators::apply_normal_transpose(std::span<const Vec2> positions) const {
  Eigen::VectorXd out(mass.size());
  for (std::size_t j = 0; j < normal.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = dot(normal[j], positions[j]);
  }
  return out;
}

Eigen::SparseMatrix<double> AssembledOperators::stiffness_matrix() const {
  const Eigen::Index n = mass.size();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(3 * n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index next = (j + 1) % n;
    t.emplace_back(j, j, stiffness_diag[j]);
    t.emplace_back(j, next, stiffness_upper[j]);
    t.emplace_back(next, j, stiffness_upper[j]);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

Eigen::SparseMatrix<double> AssembledOperators::normal_matrix() const {
  const Eigen::Index n = mass.size();
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index j = 0; j < n; ++j) {
    t.emplace_back(j, j, normal[static_cast<std::size_t>(j)].x);
    t.emplace_back(n + j, j, normal[static_cast<std::size_t>(j)].y);
  }
  Eigen::SparseMatrix<double> m(2 * n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

NodalField discrete_curvature(const PolygonalCurve& curve) {
  if (const auto report = check_wellposed(curve.nodes()); !report.ok()) {
    throw WellPosednessViolation(report.violated_condition, report.detail);
  }
  const AssembledOperators ops = assemble(curve);
  const std::size_t n = curve.size();
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::VectorXd xs(ni), ys(ni);
  for (std::size_t j = 0; j < n; ++j) {
    xs[static_cast<Eigen::Index>(j)] = curve[j].x;
    ys[static_cast<Eigen::Index>(j)] = curve[j].y;
  }
  const Eigen::VectorXd ax = ops.apply_stiffness(xs);
  const Eigen::VectorXd ay = ops.apply_stiffness(ys);

  // Nmat^T Nmat is diagonal because each coordinate block of Nmat is.
  Eigen::VectorXd gram(ni);
  for (std::size_t j = 0; j < n; ++j) gram[static_cast<Eigen::Index>(j)] = dot(ops.normal[j], ops.normal[j]);
  const double hi = gram.maxCoeff();
  const double lo = gram.minCoeff();
  const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition <= kNormalMatrixConditionLimit)) throw SingularNormalMatrix(condition);

  NodalField kappa{Eigen::VectorXd(ni)};
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    kappa.values[jj] = (ops.normal[j].x * ax[jj] + ops.normal[j].y * ay[jj]) / gram[jj];
  }
  return kappa;
}

}  // namespace geomflow

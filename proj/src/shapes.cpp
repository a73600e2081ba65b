#include "geomflow/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "geomflow/errors.hpp"

namespace geomflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vec2 tube_point(const shape::Tube& t, double rho) {
  const double half = 0.5 * t.rect_length;
  const double cap = std::numbers::pi * t.radius;
  const double total = 2.0 * t.rect_length + 2.0 * cap;
  double s = (rho - std::floor(rho)) * total;
  // Clockwise from the top-left junction: top edge, right cap, bottom edge, left cap.
  if (s < t.rect_length) return {-half + s, t.radius};
  s -= t.rect_length;
  if (s < cap) {
    const double th = 0.5 * std::numbers::pi - s / t.radius;
    return {half + t.radius * std::cos(th), t.radius * std::sin(th)};
  }
  s -= cap;
  if (s < t.rect_length) return {half - s, -t.radius};
  s -= t.rect_length;
  const double th = -0.5 * std::numbers::pi - s / t.radius;
  return {-half + t.radius * std::cos(th), t.radius * std::sin(th)};
}

/// Cumulative chord lengths of the curve over a uniform parameter grid, refined
/// until the Richardson-extrapolated perimeter is converged.
struct ArclengthTable {
  std::vector<Vec2> points;  // M + 1 entries, points[M] == points[0]
  std::vector<double> cumulative;
  double perimeter = 0.0;

  std::size_t intervals() const { return points.size() - 1; }
};

ArclengthTable build_table(const std::function<Vec2(double)>& param) {
  constexpr std::size_t kStart = 1024;
  constexpr std::size_t kMax = std::size_t{1} << 22;
  constexpr double kRelTol = 1e-10;

  auto chord_sum = [&](std::size_t m, ArclengthTable* out) {
    std::vector<Vec2> pts(m + 1);
    for (std::size_t k = 0; k < m; ++k) pts[k] = param(static_cast<double>(k) / m);
    pts[m] = pts[0];
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t k = 1; k <= m; ++k) cum[k] = cum[k - 1] + norm(pts[k] - pts[k - 1]);
    const double total = cum[m];
    if (out) {
      out->points = std::move(pts);
      out->cumulative = std::move(cum);
    }
    return total;
  };

  double coarse = chord_sum(kStart / 2, nullptr);
  double prev_extrapolated = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t m = kStart; m <= kMax; m *= 2) {
    ArclengthTable table;
    const double fine = chord_sum(m, &table);
    const double extrapolated = (4.0 * fine - coarse) / 3.0;
    if (!std::isfinite(fine)) break;
    if (std::abs(extrapolated - prev_extrapolated) < kRelTol * extrapolated) {
      table.perimeter = extrapolated;
      return table;
    }
    prev_extrapolated = extrapolated;
    coarse = fine;
  }
  throw SamplingFailure("arclength table did not converge");
}

/// Walks N-1 equal chords of length c from rho = 0. Returns c minus the closing
/// chord (increasing in c), or +inf when the walk runs past rho = 1.
double chord_walk(const std::function<Vec2(double)>& param, const ArclengthTable& table,
                  std::size_t n, double c, std::vector<double>* rhos) {
  const std::size_t m = table.intervals();
  const double dm = static_cast<double>(m);
  double rho_prev = 0.0;
  Vec2 p_prev = table.points[0];
  std::size_t k = 0;
  if (rhos) {
    rhos->assign(1, 0.0);
    rhos->reserve(n);
  }
  for (std::size_t j = 1; j < n; ++j) {
    std::size_t kk = k + 1;
    while (kk <= m && norm(table.points[kk] - p_prev) < c) ++kk;
    if (kk > m) return std::numeric_limits<double>::infinity();
    double lo = std::max(rho_prev, static_cast<double>(kk - 1) / dm);
    double hi = static_cast<double>(kk) / dm;
    double f_lo = norm(param(lo) - p_prev) - c;
    double f_hi = norm(table.points[kk] - p_prev) - c;
    // Illinois variant of regula falsi.
    double root = hi;
    int side = 0;
    for (int it = 0; it < 100; ++it) {
      double r = (f_hi - f_lo) != 0.0 ? hi - f_hi * (hi - lo) / (f_hi - f_lo) : 0.5 * (lo + hi);
      if (!(r > lo && r < hi)) r = 0.5 * (lo + hi);
      const double fr = norm(param(r) - p_prev) - c;
      root = r;
      if (std::abs(fr) <= 1e-15 * c || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) {
        break;
      }
      if ((fr > 0.0) == (f_hi > 0.0)) {
        hi = r;
        f_hi = fr;
        if (side == 1) f_lo *= 0.5;
        side = 1;
      } else {
        lo = r;
        f_lo = fr;
        if (side == -1) f_hi *= 0.5;
        side = -1;
      }
    }
    rho_prev = root;
    p_prev = param(root);
    k = kk - 1;
    if (rhos) rhos->push_back(root);
  }
  return c - norm(table.points[0] - p_prev);
}

std::function<Vec2(double)> smooth_parametrization(const ShapeSpec& shape) {
  return [&shape](double rho) { return shape_point(shape, rho); };
}

PolygonalCurve sample_smooth(const ShapeSpec& shape, std::size_t n) {
  const auto param = smooth_parametrization(shape);
  const ArclengthTable table = build_table(param);
  const double nominal = table.perimeter / static_cast<double>(n);

  double c_hi = nominal;
  if (chord_walk(param, table, n, c_hi, nullptr) < 0.0) {
    throw SamplingFailure("chord walk could not bracket the edge length from above");
  }
  double c_lo = 0.5 * nominal;
  int shrink = 0;
  while (chord_walk(param, table, n, c_lo, nullptr) >= 0.0) {
    c_lo *= 0.5;
    if (++shrink > 10) throw SamplingFailure("chord walk could not bracket the edge length");
  }
  for (int it = 0; it < 200 && c_hi - c_lo > 2.0 * std::numeric_limits<double>::epsilon() * c_hi;
       ++it) {
    const double mid = 0.5 * (c_lo + c_hi);
    const double g = chord_walk(param, table, n, mid, nullptr);
    if (g >= 0.0) {
      c_hi = mid;
    } else {
      c_lo = mid;
    }
    if (g == 0.0) break;
  }
  std::vector<double> rhos;
  double g = chord_walk(param, table, n, c_lo, &rhos);
  if (!std::isfinite(g) || rhos.size() != n) {
    g = chord_walk(param, table, n, c_hi, &rhos);
  }
  if (!std::isfinite(g) || rhos.size() != n) throw SamplingFailure("chord walk failed");
  std::vector<Vec2> nodes(n);
  for (std::size_t j = 0; j < n; ++j) nodes[j] = param(rhos[j]);
  return PolygonalCurve(std::move(nodes));
}

PolygonalCurve sample_tube(const shape::Tube& t, std::size_t n) {
  if (n < 4) throw InvalidArgument("the tube needs at least 4 vertices (one per arc)");
  const double cap = std::numbers::pi * t.radius;
  const double lengths[4] = {t.rect_length, cap, t.rect_length, cap};
  const double total = 2.0 * (t.rect_length + cap);

  // Largest-remainder apportionment of edges to arcs, at least one per arc.
  std::size_t counts[4];
  double remainders[4];
  std::size_t assigned = 0;
  for (int k = 0; k < 4; ++k) {
    const double share = static_cast<double>(n) * lengths[k] / total;
    counts[k] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(share)));
    remainders[k] = share - std::floor(share);
    assigned += counts[k];
  }
  while (assigned < n) {
    const int k = static_cast<int>(std::max_element(remainders, remainders + 4) - remainders);
    ++counts[k];
    remainders[k] -= 1.0;
    ++assigned;
  }
  while (assigned > n) {
    int k = -1;
    for (int i = 0; i < 4; ++i) {
      if (counts[i] > 1 && (k < 0 || remainders[i] < remainders[k])) k = i;
    }
    --counts[k];
    remainders[k] += 1.0;
    --assigned;
  }

  const double half = 0.5 * t.rect_length;
  const double r = t.radius;
  const double pi = std::numbers::pi;
  std::vector<Vec2> nodes;
  nodes.reserve(n);
  for (std::size_t i = 0; i < counts[0]; ++i) {
    nodes.push_back({-half + t.rect_length * static_cast<double>(i) / counts[0], r});
  }
  for (std::size_t i = 0; i < counts[1]; ++i) {
    const double th = 0.5 * pi - pi * static_cast<double>(i) / counts[1];
    nodes.push_back({half + r * std::cos(th), r * std::sin(th)});
  }
  for (std::size_t i = 0; i < counts[2]; ++i) {
    nodes.push_back({half - t.rect_length * static_cast<double>(i) / counts[2], -r});
  }
  for (std::size_t i = 0; i < counts[3]; ++i) {
    const double th = -0.5 * pi - pi * static_cast<double>(i) / counts[3];
    nodes.push_back({-half + r * std::cos(th), r * std::sin(th)});
  }
  return PolygonalCurve(std::move(nodes));
}

}  // namespace

void validate(const ShapeSpec& shape) {
  std::visit(Overloaded{
                 [](const shape::Circle& c) {
                   if (!(c.radius > 0.0)) throw InvalidArgument("circle radius must be > 0");
                 },
                 [](const shape::Ellipse& e) {
                   if (!(e.a > 0.0 && e.b > 0.0)) {
                     throw InvalidArgument("ellipse semi-axes must be > 0");
                   }
                 },
                 [](const shape::Tube& t) {
                   if (!(t.rect_length > 0.0 && t.radius > 0.0)) {
                     throw InvalidArgument("tube length and radius must be > 0");
                   }
                 },
                 [](const shape::Flower&) {},
                 [](const shape::NonconvexBenchmark&) {},
                 [](const shape::Custom& c) {
                   if (!c.parametrization) {
                     throw InvalidArgument("custom shape has no parametrization");
                   }
                 },
             },
             shape);
}

std::string shape_name(const ShapeSpec& shape) {
  return std::visit(Overloaded{
                        [](const shape::Circle&) { return std::string("circle"); },
                        [](const shape::Ellipse&) { return std::string("ellipse"); },
                        [](const shape::Tube&) { return std::string("tube"); },
                        [](const shape::Flower&) { return std::string("flower"); },
                        [](const shape::NonconvexBenchmark&) { return std::string("nonconvex"); },
                        [](const shape::Custom& c) { return "custom-" + c.name; },
                    },
                    shape);
}

std::string shape_key(const ShapeSpec& shape) {
  return std::visit(
      Overloaded{
          [](const shape::Circle& c) { return fmt::format("circle_r{:.17g}", c.radius); },
          [](const shape::Ellipse& e) { return fmt::format("ellipse_a{:.17g}_b{:.17g}", e.a, e.b); },
          [](const shape::Tube& t) {
            return fmt::format("tube_l{:.17g}_r{:.17g}", t.rect_length, t.radius);
          },
          [](const shape::Flower&) { return std::string("flower"); },
          [](const shape::NonconvexBenchmark&) { return std::string("nonconvex"); },
          [](const shape::Custom& c) { return "custom-" + c.name; },
      },
      shape);
}

Vec2 shape_point(const ShapeSpec& shape, double rho) {
  return std::visit(
      Overloaded{
          [rho](const shape::Circle& c) {
            return Vec2{c.radius * std::cos(kTwoPi * rho), c.radius * std::sin(kTwoPi * rho)};
          },
          [rho](const shape::Ellipse& e) {
            return Vec2{e.a * std::cos(kTwoPi * rho), e.b * std::sin(kTwoPi * rho)};
          },
          [rho](const shape::Tube& t) { return tube_point(t, rho); },
          [rho](const shape::Flower&) {
            const double r = 2.0 + std::cos(6.0 * kTwoPi * rho);
            return Vec2{r * std::cos(kTwoPi * rho), r * std::sin(kTwoPi * rho)};
          },
          [rho](const shape::NonconvexBenchmark&) {
            const double th = kTwoPi * rho;
            const double s3 = std::sin(3.0 * th);
            return Vec2{std::cos(th),
                        std::sin(std::cos(th)) + std::sin(th) * (0.7 + std::sin(th) * s3 * s3)};
          },
          [rho](const shape::Custom& c) { return c.parametrization(rho); },
      },
      shape);
}

double shape_perimeter(const ShapeSpec& shape) {
  validate(shape);
  if (const auto* c = std::get_if<shape::Circle>(&shape)) return kTwoPi * c->radius;
  if (const auto* t = std::get_if<shape::Tube>(&shape)) {
    return 2.0 * t->rect_length + kTwoPi * t->radius;
  }
  return build_table(smooth_parametrization(shape)).perimeter;
}

PolygonalCurve shrinking_circle(double initial_radius, double t, std::size_t n) {
  const double r2 = initial_radius * initial_radius - 2.0 * t;
  if (!(r2 > 0.0)) throw InvalidArgument("shrinking circle has vanished at this time");
  if (n < 3) throw InvalidArgument("need at least 3 vertices");
  const double r = std::sqrt(r2);
  std::vector<Vec2> nodes(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    nodes[j] = {r * std::cos(th), r * std::sin(th)};
  }
  return PolygonalCurve(std::move(nodes));
}

PolygonalCurve equidistributed_sample(const ShapeSpec& shape, std::size_t n) {
  validate(shape);
  if (n < 3) throw InvalidArgument("need at least 3 vertices");
  if (const auto* c = std::get_if<shape::Circle>(&shape)) return shrinking_circle(c->radius, 0.0, n);
  if (const auto* t = std::get_if<shape::Tube>(&shape)) return sample_tube(*t, n);
  return sample_smooth(shape, n);
}

std::vector<CatalogEntry> shape_catalog() {
  return {
      {"circle", "unit circle (radius 1)", shape::Circle{}},
      {"ellipse", "ellipse x^2/4 + y^2 = 1 (semi-axes 2 and 1)", shape::Ellipse{}},
      {"tube", "4 x 1 rectangle with semicircular caps of radius 0.5", shape::Tube{}},
      {"flower", "r(theta) = 2 + cos(6 theta)", shape::Flower{}},
      {"nonconvex",
       "(cos 2pi r, sin(cos 2pi r) + sin 2pi r (0.7 + sin 2pi r sin^2 6pi r))",
       shape::NonconvexBenchmark{}},
  };
}

ShapeSpec shape_from_name(const std::string& name) {
  for (const auto& entry : shape_catalog()) {
    if (entry.name == name) return entry.spec;
  }
  throw InvalidArgument("unknown shape '" + name + "'");
}

}  // namespace geomflow

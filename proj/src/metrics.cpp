#include "geomflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "geomflow/errors.hpp"

namespace geomflow {

namespace {

void require_same_size(const PolygonalCurve& a, const PolygonalCurve& b) {
  if (a.size() != b.size()) {
    throw SizeMismatch(fmt::format("function metrics need equal node counts, got {} and {}", a.size(),
                                   b.size()));
  }
}

// Counterclockwise, starting at the lexicographically smallest node. Makes the
// shape metrics independent of orientation and of the starting node.
std::vector<Vec2> canonical(const PolygonalCurve& c) {
  std::vector<Vec2> pts = c.nodes();
  if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
  const auto first = std::min_element(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) {
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  });
  std::rotate(pts.begin(), first, pts.end());
  return pts;
}

struct Box {
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  void add(const Vec2& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
};

Box bounds(const std::vector<Vec2>& pts) {
  Box b;
  for (const auto& p : pts) b.add(p);
  return b;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

bool segments_cross(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
  const double d1 = cross(p1 - p0, q0 - p0);
  const double d2 = cross(p1 - p0, q1 - p0);
  const double d3 = cross(q1 - q0, p0 - q0);
  const double d4 = cross(q1 - q0, p1 - q0);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

double segment_segment_distance(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
  if (segments_cross(p0, p1, q0, q1)) return 0.0;
  return std::min({point_segment_distance(p0, q0, q1), point_segment_distance(p1, q0, q1),
                   point_segment_distance(q0, p0, p1), point_segment_distance(q1, p0, p1)});
}

// Uniform bucket grid over the segments of a closed polyline; segment i joins
// node i and node i+1.
class SegmentGrid {
 public:
  explicit SegmentGrid(const std::vector<Vec2>& pts) : pts_(pts), stamp_(pts.size(), 0) {
    const std::size_t n = pts.size();
    box_ = bounds(pts);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += norm(seg_end(i) - pts[i]);
    const double w = box_.hi.x - box_.lo.x;
    const double h = box_.hi.y - box_.lo.y;
    cell_ = std::max(total / static_cast<double>(n), std::sqrt(std::max(w * h, 0.0) / static_cast<double>(n)));
    if (!(cell_ > 0.0)) cell_ = 1.0;
    nx_ = std::clamp(static_cast<long>(std::ceil(w / cell_)), 1L, 4096L);
    ny_ = std::clamp(static_cast<long>(std::ceil(h / cell_)), 1L, 4096L);
    cell_ = std::max({cell_, w / static_cast<double>(nx_), h / static_cast<double>(ny_)});
    cells_.assign(static_cast<std::size_t>(nx_ * ny_), {});
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = pts[i];
      const Vec2 b = seg_end(i);
      const long x0 = cx(std::min(a.x, b.x)), x1 = cx(std::max(a.x, b.x));
      const long y0 = cy(std::min(a.y, b.y)), y1 = cy(std::max(a.y, b.y));
      for (long y = y0; y <= y1; ++y)
        for (long x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y * nx_ + x)].push_back(i);
    }
  }

  const Vec2& seg_start(std::size_t i) const { return pts_[i]; }
  const Vec2& seg_end(std::size_t i) const { return pts_[(i + 1) % pts_.size()]; }

  double nearest(const Vec2& p) const {
    const long px = cx(p.x), py = cy(p.y);
    double best = std::numeric_limits<double>::infinity();
    const long max_ring = std::max(nx_, ny_);
    for (long r = 0; r <= max_ring; ++r) {
      for (long y = py - r; y <= py + r; ++y) {
        if (y < 0 || y >= ny_) continue;
        const bool edge_row = (y == py - r || y == py + r);
        for (long x = px - r; x <= px + r; x += (edge_row ? 1 : 2 * r)) {
          if (x >= 0 && x < nx_) {
            for (std::size_t s : cells_[static_cast<std::size_t>(y * nx_ + x)]) {
              best = std::min(best, point_segment_distance(p, seg_start(s), seg_end(s)));
            }
          }
          if (r == 0) break;
        }
      }
      if (best <= static_cast<double>(r) * cell_) break;
    }
    return best;
  }

  /// Each segment whose bounding box may meet [lo, hi] is visited once.
  template <class F>
  void for_each_near(const Vec2& lo, const Vec2& hi, F&& f) const {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    const long x0 = cx(lo.x), x1 = cx(hi.x), y0 = cy(lo.y), y1 = cy(hi.y);
    for (long y = y0; y <= y1; ++y) {
      for (long x = x0; x <= x1; ++x) {
        for (std::size_t s : cells_[static_cast<std::size_t>(y * nx_ + x)]) {
          if (stamp_[s] == epoch_) continue;
          stamp_[s] = epoch_;
          f(s);
        }
      }
    }
  }

 private:
  long cx(double x) const {
    return std::clamp(static_cast<long>(std::floor((x - box_.lo.x) / cell_)), 0L, nx_ - 1);
  }
  long cy(double y) const {
    return std::clamp(static_cast<long>(std::floor((y - box_.lo.y) / cell_)), 0L, ny_ - 1);
  }

  const std::vector<Vec2>& pts_;
  Box box_;
  double cell_ = 1.0;
  long nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
  mutable std::vector<unsigned> stamp_;
  mutable unsigned epoch_ = 0;
};

// Crossing-number point location with horizontal strips.
class PointLocator {
 public:
  explicit PointLocator(const std::vector<Vec2>& pts) : pts_(pts) {
    const std::size_t n = pts.size();
    const Box b = bounds(pts);
    y0_ = b.lo.y;
    nstrips_ = std::max<std::size_t>(1, n);
    height_ = (b.hi.y - b.lo.y) / static_cast<double>(nstrips_);
    if (!(height_ > 0.0)) height_ = 1.0;
    strips_.assign(nstrips_, {});
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = pts[i];
      const Vec2& q = pts[(i + 1) % n];
      const std::size_t s0 = strip(std::min(p.y, q.y));
      const std::size_t s1 = strip(std::max(p.y, q.y));
      for (std::size_t s = s0; s <= s1; ++s) strips_[s].push_back(i);
    }
  }

  bool inside(const Vec2& m) const {
    const std::size_t n = pts_.size();
    bool in = false;
    for (std::size_t i : strips_[strip(m.y)]) {
      const Vec2& p = pts_[i];
      const Vec2& q = pts_[(i + 1) % n];
      if ((p.y > m.y) != (q.y > m.y)) {
        const double x = p.x + (m.y - p.y) * (q.x - p.x) / (q.y - p.y);
        if (m.x < x) in = !in;
      }
    }
    return in;
  }

 private:
  std::size_t strip(double y) const {
    const double s = std::floor((y - y0_) / height_);
    if (!(s > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(s), nstrips_ - 1);
  }

  const std::vector<Vec2>& pts_;
  double y0_ = 0.0;
  double height_ = 1.0;
  std::size_t nstrips_ = 1;
  std::vector<std::vector<std::size_t>> strips_;
};

struct Overlap {
  double lo, hi;
  bool same_direction;
};

struct EdgeSplits {
  std::vector<std::vector<double>> params;
  std::vector<std::vector<Overlap>> overlaps;

  explicit EdgeSplits(std::size_t n) : params(n), overlaps(n) {}
};

void record_overlap(EdgeSplits& e, std::size_t i, double t0, double t1, bool same) {
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(1.0, std::max(t0, t1));
  if (hi <= lo) return;
  e.params[i].push_back(lo);
  e.params[i].push_back(hi);
  e.overlaps[i].push_back({lo, hi, same});
}

// Only the pair test depends on which curve is "first"; it is written so that
// swapping the roles yields bit-identical parameters.
void intersect_pair(const Vec2& p, const Vec2& r, const Vec2& q, const Vec2& s, double tol,
                    EdgeSplits& ea, std::size_t i, EdgeSplits& eb, std::size_t k) {
  const double d = cross(r, s);
  const Vec2 qp = q - p;
  const double lr = norm(r), ls = norm(s);
  if (std::abs(d) > 1e-13 * lr * ls) {
    const double t = cross(qp, s) / d;
    const double u = cross(qp, r) / d;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) {
      ea.params[i].push_back(t);
      eb.params[k].push_back(u);
    }
    return;
  }
  // Parallel: only collinear overlaps matter.
  const Vec2 pq = p - q;
  if (std::abs(cross(qp, r)) > tol * lr || std::abs(cross(pq, s)) > tol * ls) return;
  const bool same = dot(r, s) > 0.0;
  record_overlap(ea, i, dot(qp, r) / (lr * lr), dot(qp + s, r) / (lr * lr), same);
  record_overlap(eb, k, dot(pq, s) / (ls * ls), dot(pq + r, s) / (ls * ls), same);
}

// Contribution of the boundary of `own` that lies inside `other` to the
// Green's theorem integral of the intersection area.
double inside_contribution(const std::vector<Vec2>& own, EdgeSplits& splits, const PointLocator& other) {
  const std::size_t n = own.size();
  double sum = 0.0;
  std::vector<double> ts;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = own[i];
    const Vec2& q = own[(i + 1) % n];
    const Vec2 r = q - p;
    ts = splits.params[i];
    ts.push_back(0.0);
    ts.push_back(1.0);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    auto at = [&](double t) { return t == 0.0 ? p : (t == 1.0 ? q : p + t * r); };
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double t0 = ts[k], t1 = ts[k + 1];
      const double tm = 0.5 * (t0 + t1);
      double weight = -1.0;
      for (const Overlap& o : splits.overlaps[i]) {
        if (tm > o.lo && tm < o.hi) weight = o.same_direction ? 0.5 : 0.0;
      }
      if (weight < 0.0) weight = other.inside(p + tm * r) ? 1.0 : 0.0;
      if (weight == 0.0) continue;
      sum += weight * 0.5 * cross(at(t0), at(t1));
    }
  }
  return sum;
}

double area_of(const std::vector<Vec2>& pts) {
  const std::size_t n = pts.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += 0.5 * cross(pts[i], pts[(i + 1) % n]);
  return sum;
}

struct ClipInput {
  std::vector<Vec2> a, b;
  double area_a = 0.0, area_b = 0.0;
};

// Canonical node order, centered on the midpoint of the joint bounding box.
ClipInput prepare(const PolygonalCurve& ca, const PolygonalCurve& cb) {
  ClipInput in{canonical(ca), canonical(cb)};
  Box box = bounds(in.a);
  for (const auto& p : in.b) box.add(p);
  const Vec2 c = 0.5 * (box.lo + box.hi);
  for (auto& p : in.a) p -= c;
  for (auto& p : in.b) p -= c;
  in.area_a = area_of(in.a);
  in.area_b = area_of(in.b);
  return in;
}

double intersection_of(const ClipInput& in) {
  const auto& a = in.a;
  const auto& b = in.b;
  const std::size_t na = a.size(), nb = b.size();
  Box box = bounds(a);
  for (const auto& p : b) box.add(p);
  const double extent = std::max(box.hi.x - box.lo.x, box.hi.y - box.lo.y);
  const double tol = 1e-14 * extent;

  EdgeSplits sa(na), sb(nb);
  const SegmentGrid gb(b);
  for (std::size_t i = 0; i < na; ++i) {
    const Vec2& p = a[i];
    const Vec2& p1 = a[(i + 1) % na];
    const Vec2 lo{std::min(p.x, p1.x) - tol, std::min(p.y, p1.y) - tol};
    const Vec2 hi{std::max(p.x, p1.x) + tol, std::max(p.y, p1.y) + tol};
    gb.for_each_near(lo, hi, [&](std::size_t k) {
      const Vec2& q = gb.seg_start(k);
      const Vec2& q1 = gb.seg_end(k);
      if (std::max(q.x, q1.x) < lo.x || std::min(q.x, q1.x) > hi.x || std::max(q.y, q1.y) < lo.y ||
          std::min(q.y, q1.y) > hi.y) {
        return;
      }
      intersect_pair(p, p1 - p, q, q1 - q, tol, sa, i, sb, k);
    });
  }
  const PointLocator la(a), lb(b);
  const double from_a = inside_contribution(a, sa, lb);
  const double from_b = inside_contribution(b, sb, la);
  const double area = from_a + from_b;

  const double slack = 1e-9 * std::max(in.area_a, in.area_b);
  if (!std::isfinite(area) || area < -slack || area > std::min(in.area_a, in.area_b) + slack) {
    throw ClippingFailure(fmt::format(
        "intersection area {:.17g} is inconsistent with the polygon areas {:.17g} and {:.17g}", area,
        in.area_a, in.area_b));
  }
  return std::clamp(area, 0.0, std::min(in.area_a, in.area_b));
}

double directed(const std::vector<Vec2>& a, const SegmentGrid& gb, double delta) {
  const std::size_t na = a.size();
  std::vector<double> dv(na);
  double best = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    dv[i] = gb.nearest(a[i]);
    best = std::max(best, dv[i]);
  }
  struct Interval {
    double s0, s1, d0, d1;
  };
  std::vector<std::size_t> cand;
  std::vector<Interval> stack;
  for (std::size_t i = 0; i < na; ++i) {
    const Vec2& p = a[i];
    const Vec2& q = a[(i + 1) % na];
    const double len = norm(q - p);
    const double d0 = dv[i], d1 = dv[(i + 1) % na];
    // distance to b is 1-Lipschitz along the edge
    const double bound = 0.5 * (d0 + d1 + len);
    if (bound <= best || len <= delta) continue;
    cand.clear();
    bool shared = false;  // the same edge also belongs to b
    const Vec2 lo{std::min(p.x, q.x) - bound, std::min(p.y, q.y) - bound};
    const Vec2 hi{std::max(p.x, q.x) + bound, std::max(p.y, q.y) + bound};
    gb.for_each_near(lo, hi, [&](std::size_t k) {
      const Vec2& u = gb.seg_start(k);
      const Vec2& v = gb.seg_end(k);
      if ((u == p && v == q) || (u == q && v == p)) shared = true;
      if (segment_segment_distance(p, q, u, v) <= bound) cand.push_back(k);
    });
    if (shared) continue;
    auto dist = [&](double s) {
      const Vec2 x = p + s * (q - p);
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t k : cand) m = std::min(m, point_segment_distance(x, gb.seg_start(k), gb.seg_end(k)));
      return m;
    };
    stack.clear();
    stack.push_back({0.0, 1.0, d0, d1});
    while (!stack.empty()) {
      const Interval iv = stack.back();
      stack.pop_back();
      const double l = (iv.s1 - iv.s0) * len;
      if (0.5 * (iv.d0 + iv.d1 + l) <= best || l <= delta) continue;
      const double sm = 0.5 * (iv.s0 + iv.s1);
      const double dm = dist(sm);
      best = std::max(best, dm);
      stack.push_back({sm, iv.s1, dm, iv.d1});
      stack.push_back({iv.s0, sm, iv.d0, dm});
    }
  }
  return best;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::L2: return "l2";
    case MetricKind::Linf: return "linf";
    case MetricKind::Manifold: return "manifold";
    case MetricKind::Hausdorff: return "hausdorff";
  }
  return "?";
}

MetricKind parse_metric(const std::string& text) {
  const std::string s = lower(text);
  if (s == "l2") return MetricKind::L2;
  if (s == "linf" || s == "l-inf" || s == "max") return MetricKind::Linf;
  if (s == "manifold" || s == "m") return MetricKind::Manifold;
  if (s == "hausdorff" || s == "h") return MetricKind::Hausdorff;
  throw InvalidArgument("unknown metric '" + text + "' (expected l2, linf, manifold or hausdorff)");
}

bool is_shape_metric(MetricKind kind) {
  return kind == MetricKind::Manifold || kind == MetricKind::Hausdorff;
}

double l2_error(const PolygonalCurve& a, const PolygonalCurve& b) {
  require_same_size(a, b);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const Vec2 d = a[j] - b[j];
    sum += dot(d, d);
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double linf_error(const PolygonalCurve& a, const PolygonalCurve& b) {
  require_same_size(a, b);
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, norm(a[j] - b[j]));
  return m;
}

double intersection_area(const PolygonalCurve& a, const PolygonalCurve& b) {
  return intersection_of(prepare(a, b));
}

double manifold_distance(const PolygonalCurve& a, const PolygonalCurve& b) {
  const ClipInput in = prepare(a, b);
  const double common = intersection_of(in);
  return std::max(0.0, (in.area_a + in.area_b) - 2.0 * common);
}

double default_hausdorff_resolution(const PolygonalCurve& a, const PolygonalCurve& b) {
  return 1e-3 * std::max(perimeter(a), perimeter(b)) / static_cast<double>(std::max(a.size(), b.size()));
}

double directed_hausdorff(const PolygonalCurve& a, const PolygonalCurve& b, const HausdorffOptions& options) {
  const double delta = options.resolution > 0.0 ? options.resolution : default_hausdorff_resolution(a, b);
  const std::vector<Vec2> pa = canonical(a);
  const std::vector<Vec2> pb = canonical(b);
  const SegmentGrid gb(pb);
  return directed(pa, gb, delta);
}

double hausdorff_distance(const PolygonalCurve& a, const PolygonalCurve& b, const HausdorffOptions& options) {
  return std::max(directed_hausdorff(a, b, options), directed_hausdorff(b, a, options));
}

double evaluate(MetricKind kind, const PolygonalCurve& a, const PolygonalCurve& b) {
  switch (kind) {
    case MetricKind::L2: return l2_error(a, b);
    case MetricKind::Linf: return linf_error(a, b);
    case MetricKind::Manifold: return manifold_distance(a, b);
    case MetricKind::Hausdorff: return hausdorff_distance(a, b);
  }
  throw InvalidArgument("unknown metric");
}

}  // namespace geomflow

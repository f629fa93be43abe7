#include "riseg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace riseg::geom {

double signed_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

Vec2 area_centroid(const Polygon& poly) {
  double a = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

double gyration_radius_sq(const Polygon& poly) {
  const Vec2 c = area_centroid(poly);
  double a = 0.0, j = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2 p = poly[i] - c;
    const Vec2 q = poly[(i + 1) % n] - c;
    const double w = cross(p, q);
    a += w;
    j += w * (p.squaredNorm() + p.dot(q) + q.squaredNorm());
  }
  // J = (1/12) sum w (...), A = (1/2) sum w.
  return (j / 12.0) / (a / 2.0);
}

bool contains(const Polygon& poly, const Vec2& p) {
  bool inside = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

namespace {
int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}
bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}
}  // namespace

bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  const int o1 = orientation(a0, a1, b0);
  const int o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0);
  const int o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a0, a1, b0)) return true;
  if (o2 == 0 && on_segment(a0, a1, b1)) return true;
  if (o3 == 0 && on_segment(b0, b1, a0)) return true;
  if (o4 == 0 && on_segment(b0, b1, a1)) return true;
  return false;
}

double segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  if (segments_intersect(a0, a1, b0, b1)) return 0.0;
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

double boundary_distance(const Polygon& poly, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i)
    d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return d;
}

bool intersects(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0, n = a.size(); i < n; ++i)
    for (std::size_t j = 0, m = b.size(); j < m; ++j)
      if (segments_intersect(a[i], a[(i + 1) % n], b[j], b[(j + 1) % m])) return true;
  return contains(a, b.front()) || contains(b, a.front());
}

double distance(const Polygon& a, const Polygon& b) {
  if (intersects(a, b)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (const Vec2& p : a) d = std::min(d, boundary_distance(b, p));
  for (const Vec2& p : b) d = std::min(d, boundary_distance(a, p));
  return d;
}

bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

double diameter(const Polygon& poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, (poly[i] - poly[j]).norm());
  return d;
}

Polygon transformed(const Polygon& poly, double theta, const Vec2& t) {
  const double c = std::cos(theta), s = std::sin(theta);
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) out.emplace_back(c * p.x() - s * p.y() + t.x(), s * p.x() + c * p.y() + t.y());
  return out;
}

Vec2 entry_point(const Polygon& poly, const Vec2& p, const Vec2& dir) {
  if (!contains(poly, p)) return p;
  // Ray p - s * dir, s >= 0; take the nearest edge crossing.
  double best = std::numeric_limits<double>::infinity();
  const Vec2 back = -dir;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2 e = poly[(i + 1) % n] - a;
    const double denom = cross(back, e);
    if (std::abs(denom) < 1e-15) continue;
    const Vec2 ap = a - p;
    const double s = cross(ap, e) / denom;
    const double u = cross(ap, back) / denom;
    if (s >= 0.0 && u >= 0.0 && u <= 1.0) best = std::min(best, s);
  }
  return std::isfinite(best) ? Vec2(p + best * back) : p;
}

}  // namespace riseg::geom

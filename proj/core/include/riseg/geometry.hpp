#pragma once

#include <Eigen/Core>

#include <vector>

namespace riseg::geom {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Positive for counter-clockwise vertex order.
double signed_area(const Polygon& poly);
Vec2 area_centroid(const Polygon& poly);

/// Polar second moment of area about the centroid divided by the area.
double gyration_radius_sq(const Polygon& poly);

/// Crossing-number test. Points exactly on an edge may go either way.
bool contains(const Polygon& poly, const Vec2& p);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);
double segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

/// Distance from a point to the polygon boundary.
double boundary_distance(const Polygon& poly, const Vec2& p);

/// True when the polygons share any point (edge crossing or containment).
bool intersects(const Polygon& a, const Polygon& b);

/// Minimum boundary-to-boundary distance; 0 when the polygons intersect.
double distance(const Polygon& a, const Polygon& b);

/// No two non-adjacent edges cross.
bool is_simple(const Polygon& poly);

/// Largest vertex-to-vertex distance.
double diameter(const Polygon& poly);

/// Rotates by `theta` about the origin and then translates.
Polygon transformed(const Polygon& poly, double theta, const Vec2& t);

/// Smallest s <= 0 such that p + s * dir lies on the boundary, searching
/// backwards from p. Returns p itself when p lies outside the polygon.
Vec2 entry_point(const Polygon& poly, const Vec2& p, const Vec2& dir);

}  // namespace riseg::geom

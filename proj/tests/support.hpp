#pragma once

#include <cmath>
#include <array>
#include <numbers>
#include <vector>

#include <Eigen/Geometry>

#include "riseg/geometry.hpp"
#include "riseg/raster.hpp"
#include "riseg/rng.hpp"
#include "riseg/scene.hpp"
#include "riseg/se3.hpp"

namespace riseg::testing {

inline geom::Polygon square(double side) {
  const double h = side / 2;
  return {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
}

inline geom::Polygon regular(int n, double radius) {
  geom::Polygon p;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * std::numbers::pi * i / n;
    p.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return p;
}

inline RigidBody body(int id, geom::Polygon poly, double x, double y, double theta = 0.0) {
  return {id, std::move(poly), {theta, x, y}};
}

inline SceneState scene_of(std::vector<RigidBody> bodies) {
  SceneState s;
  s.bodies = std::move(bodies);
  return s;
}

/// Two 4 cm squares side by side along x with a 1 mm gap.
inline SceneState touching_squares() {
  return scene_of({body(1, square(0.04), -0.0205, 0.0), body(2, square(0.04), 0.0205, 0.0)});
}

inline se3::Pose random_pose(Rng& rng, double max_angle = std::numbers::pi * 0.9, double max_shift = 1.0) {
  se3::Vec3 axis(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
  axis.normalize();
  se3::Twist xi;
  xi.angular = axis * uniform(rng, 0.0, max_angle);
  xi.linear = se3::Vec3(uniform(rng, -max_shift, max_shift), uniform(rng, -max_shift, max_shift),
                        uniform(rng, -max_shift, max_shift));
  return se3::exp_twist(xi);
}

/// A well-conditioned triplet around `origin` no wider than 2 cm.
inline std::array<se3::Vec3, 3> random_triplet(Rng& rng, const se3::Vec3& origin = se3::Vec3::Zero()) {
  for (;;) {
    std::array<se3::Vec3, 3> t;
    for (auto& p : t)
      p = origin + se3::Vec3(uniform(rng, -0.007, 0.007), uniform(rng, -0.007, 0.007), uniform(rng, -0.007, 0.007));
    if ((t[1] - t[0]).cross(t[2] - t[0]).norm() > 2e-5) return t;
  }
}

/// Paints a filled disk of value `v` into `u` (keeps the larger value).
inline void paint_disk(UncertaintyMap& u, double row, double col, double radius, std::uint8_t v) {
  for (int r = 0; r < u.rows(); ++r)
    for (int c = 0; c < u.cols(); ++c)
      if (std::hypot(r - row, c - col) <= radius && u(r, c) < v) u(r, c) = v;
}

/// Two certain disks `sep_px` apart on a random axis with an uncertain seam
/// disk on the segment between them, plus 0-2 stray certain disks far away.
struct PlannerFixture {
  UncertaintyMap u{256, 256, 0};
  PixelCoord a, b;
};

inline PlannerFixture planner_fixture(std::uint64_t seed, double sep_px) {
  Rng rng(seed);
  PlannerFixture f;
  const double angle = uniform(rng, 0.0, std::numbers::pi);
  const double cr = uniform(rng, 100, 156), cc = uniform(rng, 100, 156);
  const double dr = std::sin(angle) * sep_px / 2, dc = std::cos(angle) * sep_px / 2;
  f.a = {cr - dr, cc - dc};
  f.b = {cr + dr, cc + dc};
  const double radius = uniform(rng, 7.0, 10.0);
  paint_disk(f.u, f.a.row, f.a.col, radius, 200);
  paint_disk(f.u, f.b.row, f.b.col, radius, 200);
  paint_disk(f.u, cr + uniform(rng, -2, 2), cc + uniform(rng, -2, 2), uniform(rng, 3.0, 5.0), 130);
  const int strays = static_cast<int>(uniform_index(rng, 3));
  for (int i = 0; i < strays; ++i) {
    const double a2 = uniform(rng, 0.0, 2 * std::numbers::pi);
    paint_disk(f.u, cr + 95 * std::sin(a2), cc + 95 * std::cos(a2), uniform(rng, 6.0, 9.0), 200);
  }
  return f;
}

}  // namespace riseg::testing

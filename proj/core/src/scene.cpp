#include "riseg/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "riseg/errors.hpp"
#include "riseg/rng.hpp"

namespace riseg {

using geom::Polygon;
using geom::Vec2;

se3::Pose Pose2::to_pose() const { return se3::Pose::rot_z(theta, se3::Vec3(x, y, 0.0)); }

Vec2 Pose2::apply(const Vec2& p) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * p.x() - s * p.y() + x, s * p.x() + c * p.y() + y};
}

Polygon RigidBody::world_polygon() const {
  return geom::transformed(polygon, pose.theta, Vec2(pose.x, pose.y));
}

const RigidBody* SceneState::find(int id) const {
  for (const auto& b : bodies)
    if (b.id == id) return &b;
  return nullptr;
}

RigidBody* SceneState::find(int id) {
  for (auto& b : bodies)
    if (b.id == id) return &b;
  return nullptr;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Polygon random_polygon(Rng& rng, const GeneratorConfig& cfg) {
  const int n = cfg.min_vertices +
                static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cfg.max_vertices - cfg.min_vertices + 1)));
  Polygon poly;
  poly.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double angle = kTwoPi * (k + uniform(rng, -0.3, 0.3)) / n;
    const double radius = uniform(rng, 0.7, 1.0);
    poly.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
  }
  const double target = uniform(rng, cfg.min_diameter, cfg.max_diameter);
  const double scale = target / geom::diameter(poly);
  const Vec2 c = geom::area_centroid(poly);
  for (auto& p : poly) p = (p - c) * scale;
  return poly;
}

bool inside_workspace(const Polygon& poly, const Workspace& ws, double margin) {
  return std::all_of(poly.begin(), poly.end(), [&](const Vec2& p) {
    return p.x() >= ws.x_min + margin && p.x() <= ws.x_max - margin && p.y() >= ws.y_min + margin &&
           p.y() <= ws.y_max - margin;
  });
}

// Slides `shape` (rotated by theta) toward `anchor` along -dir until the gap
// drops to `gap`. Returns the centroid placement.
Vec2 slide_to_gap(const Polygon& shape, double theta, const Polygon& anchor, const Vec2& anchor_center,
                  const Vec2& dir, double gap) {
  double lo = 0.0;
  double hi = geom::diameter(shape) + geom::diameter(anchor) + gap + 0.01;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Polygon p = geom::transformed(shape, theta, anchor_center + mid * dir);
    if (geom::distance(p, anchor) >= gap)
      hi = mid;
    else
      lo = mid;
  }
  return anchor_center + hi * dir;
}

}  // namespace

SceneState generate_scene(std::uint64_t seed, int n_objects, const GeneratorConfig& cfg) {
  if (n_objects < 2 || n_objects > 8) {
    throw Error(ErrorCode::InvalidConfig, "n_objects must be in [2, 8]");
  }
  Rng rng(derive_seed({seed, 0x7363656e65ULL}));
  SceneState scene;

  // Decide which placements attach by touching; the rest sit nearby.
  const int touching = (n_objects + 1) / 2;
  std::vector<bool> attach(n_objects - 1, false);
  std::fill(attach.begin(), attach.begin() + touching, true);
  for (std::size_t i = attach.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    const bool tmp = attach[i - 1];
    attach[i - 1] = attach[j];
    attach[j] = tmp;
  }

  std::vector<Polygon> placed;
  for (int i = 0; i < n_objects; ++i) {
    const Polygon shape = random_polygon(rng, cfg);
    bool ok = false;
    for (int attempt = 0; attempt < cfg.max_attempts && !ok; ++attempt) {
      const double theta = uniform(rng, 0.0, kTwoPi);
      Vec2 center;
      int anchor = -1;
      double gap_lo = 0.0, gap_hi = 0.0;
      if (i == 0) {
        center = Vec2(uniform(rng, -0.08, 0.08), uniform(rng, -0.08, 0.08));
      } else {
        anchor = static_cast<int>(uniform_index(rng, placed.size()));
        const double phi = uniform(rng, 0.0, kTwoPi);
        const Vec2 dir(std::cos(phi), std::sin(phi));
        if (attach[i - 1]) {
          gap_lo = cfg.touch_gap_min;
          gap_hi = cfg.touch_gap_max;
        } else {
          gap_lo = cfg.separate_gap_min;
          gap_hi = cfg.separate_gap_max;
        }
        const double gap = uniform(rng, gap_lo, gap_hi);
        const RigidBody& a = scene.bodies[anchor];
        center = slide_to_gap(shape, theta, placed[anchor], Vec2(a.pose.x, a.pose.y), dir, gap);
      }
      const Polygon world = geom::transformed(shape, theta, center);
      if (!inside_workspace(world, scene.workspace, cfg.border_margin)) continue;
      bool clear = true;
      for (std::size_t j = 0; j < placed.size() && clear; ++j) {
        const double d = geom::distance(world, placed[j]);
        if (static_cast<int>(j) == anchor) {
          clear = d >= 0.9 * gap_lo && d <= gap_hi * 1.05 + 1e-6;
        } else {
          clear = d >= cfg.separate_gap_min;
        }
      }
      if (!clear) continue;
      placed.push_back(world);
      scene.bodies.push_back(RigidBody{i + 1, shape, Pose2{theta, center.x(), center.y()}});
      ok = true;
    }
    if (!ok) {
      throw Error(ErrorCode::PlacementFailure,
                  "body " + std::to_string(i + 1) + " after " + std::to_string(cfg.max_attempts) + " attempts");
    }
  }
  return scene;
}

namespace {

struct BodyMotion {
  Vec2 centroid;
  double lever = 0.0;  // cross(contact - centroid, dir)
  double gyration_sq = 1.0;
};

Pose2 moved_pose(const Pose2& start, const BodyMotion& m, const Vec2& dir, double s, const PushConfig& cfg) {
  const double angle = std::clamp(cfg.rotation_gain * s * m.lever / m.gyration_sq, -cfg.max_rotation, cfg.max_rotation);
  return Pose2{start.theta + angle, start.x + s * dir.x(), start.y + s * dir.y()};
}

bool separated(const Polygon& a, const Polygon& b, double clearance) {
  return !geom::intersects(a, b) && geom::distance(a, b) >= clearance;
}

// Point where the moved pushers meet `body`: mean of the vertices of either
// polygon lying inside or on the other, else the mean of the closest vertices.
// Counting vertices on edges keeps face-to-face contacts centred.
Vec2 chain_contact(const Polygon& body, const std::vector<Polygon>& pushers) {
  constexpr double kOnEdge = 1e-9;
  const auto inside = [](const Polygon& poly, const Vec2& v) {
    return geom::contains(poly, v) || geom::boundary_distance(poly, v) < kOnEdge;
  };
  Vec2 sum = Vec2::Zero();
  int count = 0;
  for (const auto& pusher : pushers) {
    if (!geom::intersects(body, pusher)) continue;
    for (const auto& v : pusher)
      if (inside(body, v)) sum += v, ++count;
    for (const auto& v : body)
      if (inside(pusher, v)) sum += v, ++count;
  }
  if (count > 0) return sum / count;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pusher : pushers)
    for (const auto& v : body) best = std::min(best, geom::boundary_distance(pusher, v));
  for (const auto& pusher : pushers)
    for (const auto& v : body)
      if (geom::boundary_distance(pusher, v) <= best + kOnEdge) sum += v, ++count;
  return sum / count;
}

}  // namespace

PushOutcome simulate_push(const SceneState& scene, const PushAction& action, const PushConfig& cfg) {
  PushOutcome out{scene, {}};
  const Vec2 contact = scene.pixel_to_world({static_cast<double>(action.contact_point.row),
                                             static_cast<double>(action.contact_point.col)});
  Vec2 dir(action.direction.col, action.direction.row);
  dir.normalize();

  std::vector<Polygon> world(scene.bodies.size());
  for (std::size_t i = 0; i < scene.bodies.size(); ++i) world[i] = scene.bodies[i].world_polygon();

  // Contacted body: lowest id containing the point, else nearest within eps.
  int hit = -1;
  double nearest = cfg.contact_eps;
  std::vector<std::size_t> order(scene.bodies.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scene.bodies[a].id < scene.bodies[b].id; });
  for (std::size_t i : order) {
    if (geom::contains(world[i], contact)) {
      hit = static_cast<int>(i);
      break;
    }
  }
  if (hit < 0) {
    for (std::size_t i : order) {
      const double d = geom::boundary_distance(world[i], contact);
      if (d <= nearest) nearest = d, hit = static_cast<int>(i);
    }
  }
  if (hit < 0) throw Error(ErrorCode::NoContact, "push point touches no body");

  auto motion_of = [&](std::size_t i, const Vec2& touch) {
    const RigidBody& b = scene.bodies[i];
    BodyMotion m;
    m.centroid = Vec2(b.pose.x, b.pose.y);
    m.lever = geom::cross(touch - m.centroid, dir);
    m.gyration_sq = geom::gyration_radius_sq(b.polygon);
    return m;
  };

  std::vector<bool> moved(scene.bodies.size(), false);
  std::vector<Polygon> pushers;
  {
    const BodyMotion m = motion_of(hit, geom::entry_point(world[hit], contact, dir));
    RigidBody& b = out.scene.bodies[hit];
    b.pose = moved_pose(scene.bodies[hit].pose, m, dir, action.distance, cfg);
    world[hit] = b.world_polygon();
    moved[hit] = true;
    pushers.push_back(world[hit]);
    out.moved.push_back(b.id);
  }

  while (static_cast<int>(out.moved.size()) < cfg.max_chain) {
    int next = -1;
    for (std::size_t i : order) {
      if (moved[i]) continue;
      const bool blocked = std::any_of(pushers.begin(), pushers.end(),
                                       [&](const Polygon& p) { return !separated(p, world[i], cfg.clearance); });
      if (blocked) {
        next = static_cast<int>(i);
        break;
      }
    }
    if (next < 0) break;

    const RigidBody& start = scene.bodies[next];
    const BodyMotion m = motion_of(next, chain_contact(world[next], pushers));
    auto clear_at = [&](double s) {
      RigidBody probe = start;
      probe.pose = moved_pose(start.pose, m, dir, s, cfg);
      const Polygon poly = probe.world_polygon();
      return std::all_of(pushers.begin(), pushers.end(),
                         [&](const Polygon& p) { return separated(p, poly, cfg.clearance); });
    };
    double lo = 0.0, hi = action.distance;
    while (!clear_at(hi) && hi < 8.0 * action.distance) hi *= 2.0;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      (clear_at(mid) ? hi : lo) = mid;
    }
    RigidBody& b = out.scene.bodies[next];
    b.pose = moved_pose(start.pose, m, dir, hi, cfg);
    world[next] = b.world_polygon();
    moved[next] = true;
    pushers.push_back(world[next]);
    out.moved.push_back(b.id);
  }
  return out;
}

LabelMask render_labels(const SceneState& scene) {
  LabelMask mask(scene.height, scene.width, 0);
  std::vector<const RigidBody*> bodies;
  for (const auto& b : scene.bodies) bodies.push_back(&b);
  std::sort(bodies.begin(), bodies.end(), [](auto a, auto b) { return a->id < b->id; });
  for (const RigidBody* b : bodies) {
    const Polygon poly = b->world_polygon();
    double x0 = poly[0].x(), x1 = x0, y0 = poly[0].y(), y1 = y0;
    for (const auto& p : poly) {
      x0 = std::min(x0, p.x()), x1 = std::max(x1, p.x());
      y0 = std::min(y0, p.y()), y1 = std::max(y1, p.y());
    }
    const PixelCoord lo = scene.world_to_pixel({x0, y0});
    const PixelCoord hi = scene.world_to_pixel({x1, y1});
    const int r0 = std::max(0, static_cast<int>(std::floor(lo.row)));
    const int r1 = std::min(scene.height - 1, static_cast<int>(std::ceil(hi.row)));
    const int c0 = std::max(0, static_cast<int>(std::floor(lo.col)));
    const int c1 = std::min(scene.width - 1, static_cast<int>(std::ceil(hi.col)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        if (mask(r, c) != 0) continue;
        if (geom::contains(poly, scene.pixel_to_world({double(r), double(c)}))) mask(r, c) = static_cast<Label>(b->id);
      }
    }
  }
  return mask;
}

std::vector<std::pair<int, int>> touching_pairs(const SceneState& scene, double touch_eps) {
  std::vector<std::pair<int, int>> out;
  std::vector<Polygon> world;
  for (const auto& b : scene.bodies) world.push_back(b.world_polygon());
  for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.bodies.size(); ++j) {
      if (geom::distance(world[i], world[j]) < touch_eps) {
        const int a = scene.bodies[i].id, b = scene.bodies[j].id;
        out.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace riseg

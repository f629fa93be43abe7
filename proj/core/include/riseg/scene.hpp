#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "riseg/geometry.hpp"
#include "riseg/raster.hpp"
#include "riseg/se3.hpp"

namespace riseg {

/// Planar pose: rotation about +z followed by an xy translation.
struct Pose2 {
  double theta = 0.0;
  double x = 0.0;
  double y = 0.0;

  se3::Pose to_pose() const;
  geom::Vec2 apply(const geom::Vec2& p) const;
  friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// A rigid polygonal object. The polygon is expressed in the body frame
/// with its area centroid at the origin, so `pose.x, pose.y` is the centroid.
struct RigidBody {
  int id = 0;
  geom::Polygon polygon;
  Pose2 pose;

  geom::Polygon world_polygon() const;
  friend bool operator==(const RigidBody&, const RigidBody&) = default;
};

struct Workspace {
  double x_min = -0.256;
  double y_min = -0.256;
  double x_max = 0.256;
  double y_max = 0.256;
  friend bool operator==(const Workspace&, const Workspace&) = default;
};

/// Pixel <-> world mapping of the orthographic top-down camera.
struct RasterGeometry {
  Workspace workspace;
  double pixel_pitch = 0.002;
  int height = 256;
  int width = 256;

  geom::Vec2 pixel_to_world(PixelCoord p) const {
    return {workspace.x_min + (p.col + 0.5) * pixel_pitch, workspace.y_min + (p.row + 0.5) * pixel_pitch};
  }
  PixelCoord world_to_pixel(const geom::Vec2& w) const {
    return {(w.y() - workspace.y_min) / pixel_pitch - 0.5, (w.x() - workspace.x_min) / pixel_pitch - 0.5};
  }
};

/// Orthographic top-down camera: pixel (r, c) has its center at
/// x = x_min + (c + 0.5) * pitch, y = y_min + (r + 0.5) * pitch. The camera
/// (space) frame coincides with the world frame.
struct SceneState {
  std::vector<RigidBody> bodies;
  Workspace workspace;
  double pixel_pitch = 0.002;
  int height = 256;
  int width = 256;

  RasterGeometry geometry() const { return {workspace, pixel_pitch, height, width}; }
  geom::Vec2 pixel_to_world(PixelCoord p) const { return geometry().pixel_to_world(p); }
  PixelCoord world_to_pixel(const geom::Vec2& w) const { return geometry().world_to_pixel(w); }
  const RigidBody* find(int id) const;
  RigidBody* find(int id);

  friend bool operator==(const SceneState&, const SceneState&) = default;
};

struct GeneratorConfig {
  int min_vertices = 5;
  int max_vertices = 10;
  double min_diameter = 0.04;
  double max_diameter = 0.10;
  /// Touching pairs end up with a boundary gap in [touch_gap_min, touch_gap_max].
  double touch_gap_min = 0.0002;
  double touch_gap_max = 0.0015;
  /// Pairs that are not meant to touch keep at least this gap.
  double separate_gap_min = 0.008;
  /// Upper bound of the gap used when placing a free body next to the pile.
  double separate_gap_max = 0.02;
  /// Bodies keep this distance from the workspace border.
  double border_margin = 0.04;
  int max_attempts = 400;
};

/// Random cluttered scene with ids 1..n_objects. At least ceil(n/2) body pairs
/// are placed touching (gap below 2 mm); all other pairs keep a clear gap.
/// Deterministic in `seed`. Throws PlacementFailure.
SceneState generate_scene(std::uint64_t seed, int n_objects, const GeneratorConfig& cfg = {});

/// A push in image space. `direction` holds (row, col) components.
struct PushAction {
  PixelIndex contact_point;
  PixelCoord direction;
  double distance = 0.02;
};

struct PushConfig {
  /// Rotation per meter of travel for unit normalized lever arm.
  double rotation_gain = 1.0;
  double max_rotation = 0.35;  // rad per push
  int max_chain = 4;
  /// Contact accepted this far outside a body, meters.
  double contact_eps = 0.006;
  /// Pushed bodies are separated to at least this gap.
  double clearance = 1e-5;
};

struct PushOutcome {
  SceneState scene;
  /// Ids of bodies that moved, in the order they were displaced.
  std::vector<int> moved;
};

/// Quasi-static push. The contacted body translates by distance * direction and
/// rotates about its centroid by an angle set by the contact lever arm;
/// bodies it runs into are displaced along the push direction just far enough
/// to clear it (and rotate by their own lever arm). Bodies outside the chain
/// keep their poses bit-for-bit. Throws NoContact.
PushOutcome simulate_push(const SceneState& scene, const PushAction& action, const PushConfig& cfg = {});

inline SceneState apply_push(const SceneState& scene, const PushAction& action, const PushConfig& cfg = {}) {
  return simulate_push(scene, action, cfg).scene;
}

/// Each pixel takes the id of the body covering its center; lower id wins ties.
LabelMask render_labels(const SceneState& scene);

/// Body id pairs (a < b) whose boundary distance is below `touch_eps`.
std::vector<std::pair<int, int>> touching_pairs(const SceneState& scene, double touch_eps);

}  // namespace riseg

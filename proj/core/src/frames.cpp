#include "riseg/frames.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "riseg/errors.hpp"
#include "riseg/rng.hpp"

namespace riseg {

double BodyFrame::mean_anchor_shift(const BodyFrame& later) const {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k)
    sum += std::hypot(later.anchors[k].row - anchors[k].row, later.anchors[k].col - anchors[k].col);
  return sum / 3.0;
}

namespace {

se3::Vec3 lift(const geom::Vec2& p) { return {p.x(), p.y(), 0.0}; }

}  // namespace

FramePairs sample_frames(const LabelMask& mask, const FlowField& flow, const RasterGeometry& geometry,
                         const SamplerConfig& cfg, std::uint64_t seed) {
  if (!mask.same_shape(flow.du)) throw Error(ErrorCode::ShapeMismatch, "mask and flow differ in shape");
  std::vector<PixelIndex> support;
  for (int r = 0; r < mask.rows(); ++r)
    for (int c = 0; c < mask.cols(); ++c)
      if (mask(r, c) != 0) support.push_back({r, c});
  if (support.size() < 3) throw Error(ErrorCode::InsufficientFrames, "fewer than 3 object pixels");

  // Partial Fisher-Yates: the first n entries become the sample.
  Rng rng(derive_seed({seed, 0x73616d706c65ULL}));
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.n_samples, 0)), support.size());
  for (std::size_t i = 0; i < n; ++i) std::swap(support[i], support[i + uniform_index(rng, support.size() - i)]);
  support.resize(n);

  std::vector<geom::Vec2> world(n);
  for (std::size_t i = 0; i < n; ++i)
    world[i] = geometry.pixel_to_world({double(support[i].row), double(support[i].col)});

  const se3::FrameLimits at_t_limits{cfg.area_eps, cfg.d_c};
  const se3::FrameLimits at_t1_limits{cfg.area_eps, std::numeric_limits<double>::infinity()};

  FramePairs out;
  std::vector<bool> used(n, false);
  std::vector<std::size_t> near;
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    const Label label = mask[support[i]];
    near.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || used[j] || mask[support[j]] != label) continue;
      if ((world[j] - world[i]).norm() <= cfg.d_c) near.push_back(j);
    }
    double best_area = cfg.area_eps;
    std::size_t b1 = n, b2 = n;
    for (std::size_t a = 0; a < near.size(); ++a) {
      for (std::size_t b = a + 1; b < near.size(); ++b) {
        const geom::Vec2& p1 = world[near[a]];
        const geom::Vec2& p2 = world[near[b]];
        if ((p2 - p1).norm() > cfg.d_c) continue;
        const double area = 0.5 * std::abs(geom::cross(p1 - world[i], p2 - world[i]));
        if (area > best_area) best_area = area, b1 = near[a], b2 = near[b];
      }
    }
    if (b1 == n) continue;
    // Counter-clockwise order keeps every frame's z axis on +z.
    if (geom::cross(world[b1] - world[i], world[b2] - world[i]) < 0.0) std::swap(b1, b2);
    used[i] = used[b1] = used[b2] = true;

    const std::array<std::size_t, 3> idx{i, b1, b2};
    BodyFrame f_t, f_t1;
    f_t.object_hint = f_t1.object_hint = label;
    std::array<se3::Vec3, 3> p_t, p_t1;
    for (int k = 0; k < 3; ++k) {
      const PixelIndex px = support[idx[k]];
      f_t.anchors[k] = {double(px.row), double(px.col)};
      const auto [du, dv] = sample_flow(flow, f_t.anchors[k]);
      f_t1.anchors[k] = {px.row + dv, px.col + du};
      p_t[k] = lift(world[idx[k]]);
      p_t1[k] = lift(geometry.pixel_to_world(f_t1.anchors[k]));
    }
    // A rigid motion cannot mirror or stretch a triangle. Either means the
    // anchors sit on different bodies or the flow is broken there.
    if (geom::cross((p_t1[1] - p_t1[0]).head<2>(), (p_t1[2] - p_t1[0]).head<2>()) <= 0.0) continue;
    bool rigid = true;
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3;
      const double before = std::hypot(f_t.anchors[a].row - f_t.anchors[b].row, f_t.anchors[a].col - f_t.anchors[b].col);
      const double after =
          std::hypot(f_t1.anchors[a].row - f_t1.anchors[b].row, f_t1.anchors[a].col - f_t1.anchors[b].col);
      rigid = rigid && std::abs(after - before) <= cfg.rigid_tol;
    }
    if (!rigid) continue;
    try {
      f_t.pose = se3::frame_from_triplet(p_t[0], p_t[1], p_t[2], at_t_limits);
      f_t1.pose = se3::frame_from_triplet(p_t1[0], p_t1[1], p_t1[2], at_t1_limits);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CollinearTriplet) continue;
      throw;
    }
    out.at_t.push_back(f_t);
    out.at_t1.push_back(f_t1);
  }
  if (out.at_t.size() < 3) {
    throw Error(ErrorCode::InsufficientFrames, std::to_string(out.at_t.size()) + " frames survived");
  }
  return out;
}

std::vector<se3::Twist> compute_bfifs(const std::vector<BodyFrame>& at_t, const std::vector<BodyFrame>& at_t1,
                                      se3::TwistMethod method) {
  if (at_t.size() != at_t1.size()) throw Error(ErrorCode::ShapeMismatch, "frame lists differ in length");
  std::vector<se3::Twist> out;
  out.reserve(at_t.size());
  for (std::size_t i = 0; i < at_t.size(); ++i) out.push_back(se3::spatial_twist(at_t[i].pose, at_t1[i].pose, 1.0, method));
  return out;
}

}  // namespace riseg

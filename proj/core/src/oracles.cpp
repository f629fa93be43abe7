#include "riseg/oracles.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "riseg/errors.hpp"
#include "riseg/rng.hpp"

namespace riseg {
namespace {

struct DisjointSet {
  std::map<int, int> parent;
  int find(int x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return x;
    return it->second = find(it->second);
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smaller id becomes the representative
    parent.try_emplace(b, b);
  }
};

}  // namespace

StaticObservation oracle_static_seg(const SceneState& scene, const StaticSegConfig& cfg, std::uint64_t seed) {
  const LabelMask gt = render_labels(scene);
  const int rows = gt.rows(), cols = gt.cols();

  DisjointSet merge;
  std::vector<std::pair<int, int>> merged_pairs;
  for (const auto& [a, b] : touching_pairs(scene, cfg.touch_eps)) {
    Rng pair_rng(derive_seed({seed, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)}));
    if (uniform01(pair_rng) < cfg.p_merge) {
      merge.unite(a, b);
      merged_pairs.emplace_back(a, b);
    }
  }

  StaticObservation obs{LabelMask(rows, cols, 0), UncertaintyMap(rows, cols, 0)};
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (gt(r, c) != 0) obs.labels(r, c) = static_cast<Label>(merge.find(gt(r, c)));

  // Seam band: pixels within band_px (Chebyshev) of both members of a merged
  // pair. Background pixels in the band fill the gap, so the merged region is
  // connected.
  Grid<std::uint8_t> seam(rows, cols, 0);
  const int band = cfg.band_px;
  for (const auto& [a, b] : merged_pairs) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const Label own = gt(r, c);
        if (own != 0 && own != a && own != b) continue;
        bool near_a = own == a, near_b = own == b;
        for (int dr = -band; dr <= band && !(near_a && near_b); ++dr) {
          for (int dc = -band; dc <= band; ++dc) {
            if (!gt.contains(r + dr, c + dc)) continue;
            const Label l = gt(r + dr, c + dc);
            near_a |= l == a;
            near_b |= l == b;
          }
        }
        if (!(near_a && near_b)) continue;
        if (own == 0) obs.labels(r, c) = static_cast<Label>(merge.find(a));
        seam(r, c) = 1;
      }
    }
  }

  Rng jitter_rng(derive_seed({seed, 0x6a6974746572ULL}));
  const int m = cfg.core_margin;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Label l = obs.labels(r, c);
      // One draw per pixel keeps the stream aligned regardless of content.
      const int noise = static_cast<int>(uniform_index(jitter_rng, 2 * cfg.jitter + 1)) - cfg.jitter;
      if (l == 0) continue;
      int base;
      if (seam(r, c)) {
        base = cfg.u_ambig;
      } else {
        bool rim = false;
        for (int dr = -m; dr <= m && !rim; ++dr)
          for (int dc = -m; dc <= m && !rim; ++dc)
            rim = !obs.labels.contains(r + dr, c + dc) || obs.labels(r + dr, c + dc) != l;
        base = rim ? cfg.u_edge : cfg.u_core;
      }
      obs.uncertainty(r, c) = static_cast<std::uint8_t>(std::clamp(base + noise, 0, 255));
    }
  }
  return obs;
}

FlowField oracle_flow(const SceneState& scene_t, const SceneState& scene_t1, double noise_sigma, std::uint64_t seed) {
  if (scene_t.height != scene_t1.height || scene_t.width != scene_t1.width ||
      scene_t.pixel_pitch != scene_t1.pixel_pitch || !(scene_t.workspace == scene_t1.workspace)) {
    throw Error(ErrorCode::MismatchedScenes, "raster settings differ");
  }
  auto ids = [](const SceneState& s) {
    std::vector<int> v;
    for (const auto& b : s.bodies) v.push_back(b.id);
    std::sort(v.begin(), v.end());
    return v;
  };
  if (ids(scene_t) != ids(scene_t1)) throw Error(ErrorCode::MismatchedScenes, "body id sets differ");

  const LabelMask labels = render_labels(scene_t);
  FlowField flow(scene_t.height, scene_t.width);
  std::map<int, se3::Pose> displacement;
  for (const auto& b : scene_t.bodies) {
    const Pose2& next = scene_t1.find(b.id)->pose;
    // Bodies that did not move get an exact zero flow.
    displacement[b.id] = next == b.pose ? se3::Pose::identity() : next.to_pose() * b.pose.to_pose().inverse();
  }

  Rng rng(derive_seed({seed, 0x666c6f77ULL}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < flow.rows(); ++r) {
    for (int c = 0; c < flow.cols(); ++c) {
      double du = 0.0, dv = 0.0;
      if (const Label l = labels(r, c); l != 0) {
        const geom::Vec2 w = scene_t.pixel_to_world({double(r), double(c)});
        const se3::Vec3 moved = displacement.at(l).apply(se3::Vec3(w.x(), w.y(), 0.0));
        du = (moved.x() - w.x()) / scene_t.pixel_pitch;
        dv = (moved.y() - w.y()) / scene_t.pixel_pitch;
      }
      if (noise_sigma > 0.0) {
        du += noise_sigma * gauss(rng);
        dv += noise_sigma * gauss(rng);
      }
      flow.du(r, c) = du;
      flow.dv(r, c) = dv;
    }
  }
  return flow;
}

}  // namespace riseg

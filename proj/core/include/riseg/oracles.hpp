#pragma once

#include <cstdint>

#include "riseg/raster.hpp"
#include "riseg/scene.hpp"

namespace riseg {

/// Stand-in for a learned static segmenter. Its only failure mode is
/// under-segmentation: touching bodies get merged into one region.
struct StaticSegConfig {
  double p_merge = 1.0;
  /// Bodies closer than this look like one object to the segmenter.
  double touch_eps = 0.006;  // meters
  int core_margin = 2;       // pixels
  int band_px = 2;
  int u_core = 200;
  int u_ambig = 130;
  int u_edge = 90;
  int jitter = 10;
};

struct StaticObservation {
  LabelMask labels;
  UncertaintyMap uncertainty;
};

/// Ground-truth raster with touching pairs merged (probability p_merge per
/// pair, decided by hash(seed, pair) so the decision is stable across calls)
/// plus an uncertainty heatmap: u_ambig along merged seams, u_core deep
/// inside regions, u_edge on the remaining region rim, 0 on background.
StaticObservation oracle_static_seg(const SceneState& scene, const StaticSegConfig& cfg, std::uint64_t seed);

/// Forward flow from scene_t to scene_t1 for every pixel covered at t, plus
/// isotropic Gaussian noise of `noise_sigma` pixels on every pixel.
/// Throws MismatchedScenes when body ids or raster settings differ.
FlowField oracle_flow(const SceneState& scene_t, const SceneState& scene_t1, double noise_sigma, std::uint64_t seed);

}  // namespace riseg

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "riseg/raster.hpp"
#include "riseg/scene.hpp"
#include "riseg/se3.hpp"

namespace riseg {

/// A frame attached to three sampled pixels of one object.
struct BodyFrame {
  se3::Pose pose;
  std::array<PixelCoord, 3> anchors;
  Label object_hint = 0;  // mask label under the anchors when created

  double mean_anchor_shift(const BodyFrame& later) const;
};

struct SamplerConfig {
  int n_samples = 300;
  double d_c = 0.03;      // meters
  double move_eps = 1.0;  // pixels
  double area_eps = 4e-5;  // m^2
  /// Tracked triplets whose pairwise anchor distances change by more than
  /// this many pixels are not rigidly attached to one body and are dropped.
  double rigid_tol = 1.5;
};

struct FramePairs {
  std::vector<BodyFrame> at_t;
  std::vector<BodyFrame> at_t1;
};

/// Samples n pixels from the nonzero support of `mask`, groups them greedily
/// into disjoint same-label triplets no wider than d_c (widest triangle
/// first), builds a frame per triplet, and tracks it to t+1 by displacing the
/// anchors with bilinear-sampled flow. Triplets that degenerate, flip
/// orientation or stretch by more than rigid_tol at t+1 are dropped. Throws InsufficientFrames when fewer than
/// three frames survive.
FramePairs sample_frames(const LabelMask& mask, const FlowField& flow, const RasterGeometry& geometry,
                         const SamplerConfig& cfg, std::uint64_t seed);

/// Body frame-invariant features: the spatial twist of each frame over one
/// step (dt = 1).
std::vector<se3::Twist> compute_bfifs(const std::vector<BodyFrame>& at_t, const std::vector<BodyFrame>& at_t1,
                                      se3::TwistMethod method = se3::TwistMethod::MatrixLog);

}  // namespace riseg

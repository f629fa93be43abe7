#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "riseg/kmeans.hpp"
#include "riseg/raster.hpp"
#include "riseg/scene.hpp"

namespace riseg {

struct PlannerConfig {
  int l_u = 150;          // certain: U >= l_u
  int l_l = 120;          // uncertain: l_l <= U < l_u
  double d_a = 0.10;      // max certain-center separation, meters
  double d_b = 0.04;      // max uncertain-center to segment distance, meters
  double d_push = 0.02;   // meters
  int k_max = 8;
  double perp_tol_deg = 10.0;
  double pixel_pitch = 0.002;
  double min_split_gain = 0.4;
  ElbowRule elbow_rule = ElbowRule::LastSignificantGain;
  double split_gain = 0.3;
};

/// Pixels with lo <= U < hi in row-major order. hi = 256 is unbounded.
std::vector<PixelIndex> threshold_pixels(const UncertaintyMap& u, int lo, int hi);

/// Intermediate state of a planning call, for logging and tests.
struct PlanTrace {
  std::optional<ClusterSet> certain;
  std::optional<ClusterSet> uncertain;
  int pair_i = -1;
  int pair_j = -1;
  std::vector<PixelIndex> boundary;    // boundary of certain cluster pair_i
  std::vector<PixelIndex> candidates;  // boundary points passing the perpendicular test
};

/// Chooses a short push that separates two nearby certain clusters flanking
/// an uncertain one, or nullopt when no such pair or push point exists.
/// With `split` set, pairs whose centers already sit in two different nonzero
/// labels of that mask are skipped.
std::optional<PushAction> find_action(const UncertaintyMap& u, const PlannerConfig& cfg, std::uint64_t seed,
                                      PlanTrace* trace = nullptr, const LabelMask* split = nullptr);

}  // namespace riseg

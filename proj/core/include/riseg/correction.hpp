#pragma once

#include <vector>

#include "riseg/frames.hpp"
#include "riseg/grouping.hpp"
#include "riseg/raster.hpp"

namespace riseg {

struct CorrectionConfig {
  double grad_eps = 0.75;  // pixels; max flow difference between BFS neighbours
  int min_region = 12;     // pixels
  /// Groups with fewer frames do not seed a label.
  int min_group_frames = 2;
  /// Anchors further than this from their group's common rigid motion do
  /// not seed (used when the frames at t are supplied).
  double seed_tol = 0.75;  // pixels
};

/// Result of carrying a mask from t to t+1 along the flow.
struct Projection {
  LabelMask mask;
  /// Flow resampled at t+1 pixel positions; pixels nobody landed on copy the
  /// fastest landed 8-neighbour (zero if none).
  FlowField flow_t1;
  Grid<std::uint8_t> landed;
};

/// Every labelled pixel of `prev` votes its label at round(p + flow(p)); when
/// two pixels land on the same target the one with the larger flow magnitude
/// wins. Pixels without a vote take the static label. Throws ShapeMismatch.
Projection project(const LabelMask& prev, const FlowField& flow, const LabelMask& static_mask);

inline LabelMask project_mask(const LabelMask& prev, const FlowField& flow, const LabelMask& static_mask) {
  return project(prev, flow, static_mask).mask;
}

/// Relabels the projected mask from frame groups.
///
/// Each group seeds its label at the rounded t+1 anchors of its frames and
/// grows by multi-source BFS over 4-connected foreground pixels
/// (static_mask or projected non-zero) whose flow differs from the expanding
/// neighbour by at most grad_eps. Fronts never overwrite each other; ties are
/// settled by (distance, group, row-major). A group keeps the majority
/// projected label under its seeds when no other group and no unclaimed
/// remainder of at least min_region pixels competes for it; otherwise it gets
/// a fresh label. Components below min_region without seeds are absorbed by
/// their largest neighbour. `flow_t1` must be sampled at t+1 positions
/// (see Projection::flow_t1). With `at_t`, the frames before the motion, only
/// anchors within seed_tol of the group's least-squares rigid motion seed.
LabelMask correct_mask(const LabelMask& projected, const LabelMask& static_mask, const FrameGrouping& groups,
                       const std::vector<BodyFrame>& at_t1, const FlowField& flow_t1, const CorrectionConfig& cfg,
                       const std::vector<BodyFrame>* at_t = nullptr);

/// Absorbs 4-connected components smaller than `min_region` into their largest
/// adjacent component. Pixels flagged in `keep` are never relabelled.
void absorb_small_regions(LabelMask& mask, int min_region, const Grid<std::uint8_t>* keep = nullptr);

}  // namespace riseg

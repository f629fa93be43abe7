#pragma once

#include <vector>

#include "riseg/frames.hpp"
#include "riseg/kde.hpp"

namespace riseg {

struct FrameGrouping {
  /// Disjoint sets of frame indices, each sorted; groups ordered by their
  /// smallest member.
  std::vector<std::vector<std::size_t>> groups;
  /// Frames whose anchors moved at least move_eps pixels, ascending.
  std::vector<std::size_t> moving;
};

/// Links every pair of moving frames whose same-body posterior reaches `tau`
/// and returns the connected components of the link graph. Stationary frames
/// carry no motion evidence and are left out.
FrameGrouping group_bfifs(const std::vector<se3::Twist>& twists, const std::vector<BodyFrame>& at_t,
                          const std::vector<BodyFrame>& at_t1, const GroupingModel& model, double tau,
                          double move_eps);

}  // namespace riseg

#include "riseg/grouping.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "riseg/errors.hpp"

namespace riseg {

FrameGrouping group_bfifs(const std::vector<se3::Twist>& twists, const std::vector<BodyFrame>& at_t,
                          const std::vector<BodyFrame>& at_t1, const GroupingModel& model, double tau,
                          double move_eps) {
  if (twists.size() != at_t.size() || at_t.size() != at_t1.size()) {
    throw Error(ErrorCode::ShapeMismatch, "twists and frames are not aligned");
  }
  FrameGrouping out;
  for (std::size_t i = 0; i < at_t.size(); ++i)
    if (at_t[i].mean_anchor_shift(at_t1[i]) >= move_eps) out.moving.push_back(i);

  const std::size_t m = out.moving.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t ra = find(a), rb = find(b);
      if (ra == rb) continue;  // already connected; the link adds nothing
      const auto f = pair_feature(twists[out.moving[a]], twists[out.moving[b]], model.mode);
      if (posterior_same(model, f) >= tau) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t a = 0; a < m; ++a) components[find(a)].push_back(out.moving[a]);
  for (auto& [root, members] : components) out.groups.push_back(std::move(members));
  std::sort(out.groups.begin(), out.groups.end());
  return out;
}

}  // namespace riseg

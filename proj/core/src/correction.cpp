#include "riseg/correction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "riseg/errors.hpp"

namespace riseg {
namespace {

constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};

// Keeps the largest 4-connected piece of every flagged label and moves the
// other pieces of at least min_region pixels to fresh labels. Pieces holding a
// seed stay with their label.
void split_disconnected(LabelMask& mask, const std::vector<bool>& flagged, const Grid<std::uint8_t>& seeds,
                        int min_region, Label& max_label) {
  const int rows = mask.rows(), cols = mask.cols();
  Grid<std::uint8_t> seen(rows, cols, 0);
  std::map<Label, std::vector<std::vector<PixelIndex>>> pieces;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Label l = mask(r, c);
      if (l == 0 || !flagged[l] || seen(r, c)) continue;
      std::vector<PixelIndex> list{{r, c}};
      seen(r, c) = 1;
      for (std::size_t k = 0; k < list.size(); ++k) {
        for (int n = 0; n < 4; ++n) {
          const int rr = list[k].row + kDr[n], cc = list[k].col + kDc[n];
          if (mask.contains(rr, cc) && !seen(rr, cc) && mask(rr, cc) == l) {
            seen(rr, cc) = 1;
            list.push_back({rr, cc});
          }
        }
      }
      pieces[l].push_back(std::move(list));
    }
  }
  for (auto& [label, list] : pieces) {
    if (list.size() < 2) continue;
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (std::size_t k = 1; k < list.size(); ++k) {
      if (static_cast<int>(list[k].size()) < min_region) continue;
      if (std::any_of(list[k].begin(), list[k].end(), [&](const PixelIndex& p) { return seeds[p] != 0; })) continue;
      if (max_label == 0xffff) throw Error(ErrorCode::InvalidConfig, "label space exhausted");
      ++max_label;
      for (const auto& p : list[k]) mask[p] = max_label;
    }
  }
}

// Least-squares planar rigid motion taking `from` onto `to`; returns the
// residual of every point.
std::vector<double> rigid_residuals(const std::vector<PixelCoord>& from, const std::vector<PixelCoord>& to,
                                    const std::vector<bool>& use) {
  double fr = 0, fc = 0, tr = 0, tc = 0;
  int n = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!use[i]) continue;
    fr += from[i].row, fc += from[i].col, tr += to[i].row, tc += to[i].col;
    ++n;
  }
  fr /= n, fc /= n, tr /= n, tc /= n;
  double dot = 0, crs = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!use[i]) continue;
    const double ar = from[i].row - fr, ac = from[i].col - fc, br = to[i].row - tr, bc = to[i].col - tc;
    dot += ar * br + ac * bc;
    crs += ar * bc - ac * br;
  }
  const double angle = std::atan2(crs, dot), cs = std::cos(angle), sn = std::sin(angle);
  std::vector<double> res(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    const double ar = from[i].row - fr, ac = from[i].col - fc;
    res[i] = std::hypot(tr + cs * ar - sn * ac - to[i].row, tc + sn * ar + cs * ac - to[i].col);
  }
  return res;
}

// Anchors of one group that follow the group's common rigid motion. A frame
// whose third anchor sits on a neighbouring body still reports the right
// twist (the origin and x axis fix it), but that anchor must not seed.
std::vector<bool> consistent_anchors(const std::vector<PixelCoord>& from, const std::vector<PixelCoord>& to,
                                     double tol) {
  std::vector<bool> keep(from.size(), true);
  if (from.size() < 3) return keep;
  for (int pass = 0; pass < 2; ++pass) {
    const auto res = rigid_residuals(from, to, keep);
    std::vector<bool> next(from.size());
    int n = 0;
    for (std::size_t i = 0; i < from.size(); ++i) n += next[i] = res[i] <= tol;
    if (n < 3) return keep;
    keep = std::move(next);
  }
  return keep;
}

}  // namespace

Projection project(const LabelMask& prev, const FlowField& flow, const LabelMask& static_mask) {
  if (!prev.same_shape(flow.du) || !prev.same_shape(static_mask)) {
    throw Error(ErrorCode::ShapeMismatch, "project: inputs differ in shape");
  }
  const int rows = prev.rows(), cols = prev.cols();
  Projection out{LabelMask(rows, cols, 0), FlowField(rows, cols), Grid<std::uint8_t>(rows, cols, 0)};
  Grid<double> best_mag(rows, cols, -1.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Label l = prev(r, c);
      if (l == 0) continue;
      const double du = flow.du(r, c), dv = flow.dv(r, c);
      const int tr = static_cast<int>(std::lround(r + dv));
      const int tc = static_cast<int>(std::lround(c + du));
      if (!prev.contains(tr, tc)) continue;
      const double mag = std::hypot(du, dv);
      if (mag > best_mag(tr, tc)) {
        best_mag(tr, tc) = mag;
        out.mask(tr, tc) = l;
        out.flow_t1.du(tr, tc) = du;
        out.flow_t1.dv(tr, tc) = dv;
        out.landed(tr, tc) = 1;
      }
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (out.landed(r, c)) continue;
      out.mask(r, c) = static_mask(r, c);
      // Copy the fastest landed neighbour rather than averaging: a mean would
      // put intermediate flow in the gap between two bodies and let a BFS
      // front walk across it.
      double best = -1.0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (!prev.contains(rr, cc) || !out.landed(rr, cc)) continue;
          if (best_mag(rr, cc) > best) {
            best = best_mag(rr, cc);
            out.flow_t1.du(r, c) = out.flow_t1.du(rr, cc);
            out.flow_t1.dv(r, c) = out.flow_t1.dv(rr, cc);
          }
        }
    }
  }
  return out;
}

void absorb_small_regions(LabelMask& mask, int min_region, const Grid<std::uint8_t>* keep) {
  const int rows = mask.rows(), cols = mask.cols();
  Grid<int> comp(rows, cols, -1);
  std::vector<std::vector<PixelIndex>> members;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (mask(r, c) == 0 || comp(r, c) >= 0) continue;
      const int id = static_cast<int>(members.size());
      members.emplace_back();
      auto& list = members.back();
      list.push_back({r, c});
      comp(r, c) = id;
      for (std::size_t k = 0; k < list.size(); ++k) {
        const PixelIndex p = list[k];
        for (int n = 0; n < 4; ++n) {
          const int rr = p.row + kDr[n], cc = p.col + kDc[n];
          if (mask.contains(rr, cc) && comp(rr, cc) < 0 && mask(rr, cc) == mask(r, c)) {
            comp(rr, cc) = id;
            list.push_back({rr, cc});
          }
        }
      }
    }
  }
  std::vector<std::size_t> order(members.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return members[a].size() < members[b].size(); });
  for (std::size_t id : order) {
    const auto& list = members[id];
    if (static_cast<int>(list.size()) >= min_region) break;
    if (keep && std::any_of(list.begin(), list.end(), [&](const PixelIndex& p) { return (*keep)[p] != 0; })) continue;
    std::size_t best_size = 0;
    Label best_label = 0;
    int best_comp = -1;
    for (const PixelIndex& p : list) {
      for (int n = 0; n < 4; ++n) {
        const int rr = p.row + kDr[n], cc = p.col + kDc[n];
        if (!mask.contains(rr, cc) || mask(rr, cc) == 0) continue;
        const int other = comp(rr, cc);
        if (other == static_cast<int>(id)) continue;
        const std::size_t size = members[other].size();
        if (size > best_size || (size == best_size && other < best_comp)) {
          best_size = size, best_label = mask(rr, cc), best_comp = other;
        }
      }
    }
    if (best_comp < 0) continue;
    for (const PixelIndex& p : list) {
      mask[p] = best_label;
      comp[p] = best_comp;
    }
  }
}

LabelMask correct_mask(const LabelMask& projected, const LabelMask& static_mask, const FrameGrouping& groups,
                       const std::vector<BodyFrame>& at_t1, const FlowField& flow_t1, const CorrectionConfig& cfg,
                       const std::vector<BodyFrame>* at_t) {
  if (!projected.same_shape(static_mask) || !projected.same_shape(flow_t1.du)) {
    throw Error(ErrorCode::ShapeMismatch, "correct_mask: inputs differ in shape");
  }
  std::vector<const std::vector<std::size_t>*> active;
  for (const auto& g : groups.groups)
    if (static_cast<int>(g.size()) >= std::max(1, cfg.min_group_frames)) active.push_back(&g);
  if (active.empty()) return projected;
  if (at_t && at_t->size() != at_t1.size()) throw Error(ErrorCode::ShapeMismatch, "frame lists differ in length");

  const int rows = projected.rows(), cols = projected.cols();
  Grid<int> owner(rows, cols, -1);
  Grid<std::uint8_t> seed_px(rows, cols, 0);
  std::vector<std::vector<PixelIndex>> seeds(active.size());
  std::vector<PixelIndex> frontier_px;
  std::vector<int> frontier_group;
  for (std::size_t g = 0; g < active.size(); ++g) {
    std::vector<PixelCoord> from, to;
    for (std::size_t frame : *active[g]) {
      if (frame >= at_t1.size()) throw Error(ErrorCode::ShapeMismatch, "group references unknown frame");
      for (int k = 0; k < 3; ++k) {
        to.push_back(at_t1[frame].anchors[k]);
        if (at_t) from.push_back((*at_t)[frame].anchors[k]);
      }
    }
    const std::vector<bool> keep =
        at_t ? consistent_anchors(from, to, cfg.seed_tol) : std::vector<bool>(to.size(), true);
    for (std::size_t k = 0; k < to.size(); ++k) {
      if (!keep[k]) continue;
      const PixelIndex p{static_cast<int>(std::lround(to[k].row)), static_cast<int>(std::lround(to[k].col))};
      if (!projected.contains(p)) continue;
      seeds[g].push_back(p);
      if (owner[p] >= 0) continue;  // first claim wins
      owner[p] = static_cast<int>(g);
      seed_px[p] = 1;
    }
  }

  // Level-synchronous BFS; within a level expand in (group, row, col) order.
  std::vector<std::tuple<int, int, int>> level;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (owner(r, c) >= 0) level.emplace_back(owner(r, c), r, c);
  auto admissible = [&](int r, int c) { return projected(r, c) != 0 || static_mask(r, c) != 0; };
  while (!level.empty()) {
    std::sort(level.begin(), level.end());
    std::vector<std::tuple<int, int, int>> next;
    for (const auto& [g, r, c] : level) {
      for (int n = 0; n < 4; ++n) {
        const int rr = r + kDr[n], cc = c + kDc[n];
        if (!projected.contains(rr, cc) || owner(rr, cc) >= 0 || !admissible(rr, cc)) continue;
        const double diff = std::hypot(flow_t1.du(rr, cc) - flow_t1.du(r, c), flow_t1.dv(rr, cc) - flow_t1.dv(r, c));
        if (diff > cfg.grad_eps) continue;
        owner(rr, cc) = g;
        next.emplace_back(g, rr, cc);
      }
    }
    level = std::move(next);
  }

  // Label assignment.
  Label max_label = 0;
  for (Label l : projected.data()) max_label = std::max(max_label, l);
  for (Label l : static_mask.data()) max_label = std::max(max_label, l);

  std::map<Label, int> unclaimed;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (owner(r, c) < 0 && projected(r, c) != 0) ++unclaimed[projected(r, c)];

  std::vector<Label> majority(active.size(), 0);
  std::map<Label, int> claimants;
  for (std::size_t g = 0; g < active.size(); ++g) {
    std::map<Label, int> votes;
    for (const auto& p : seeds[g])
      if (projected[p] != 0) ++votes[projected[p]];
    int best = 0;
    for (const auto& [label, count] : votes)
      if (count > best) best = count, majority[g] = label;
    if (majority[g] != 0) ++claimants[majority[g]];
  }
  std::vector<Label> assigned(active.size(), 0);
  for (std::size_t g = 0; g < active.size(); ++g) {
    const Label l = majority[g];
    const bool remainder = l != 0 && unclaimed[l] >= cfg.min_region;
    if (l != 0 && claimants[l] == 1 && !remainder) {
      assigned[g] = l;
    } else {
      if (max_label == 0xffff) throw Error(ErrorCode::InvalidConfig, "label space exhausted");
      assigned[g] = ++max_label;
    }
  }

  LabelMask out = projected;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (owner(r, c) >= 0) out(r, c) = assigned[owner(r, c)];

  // A body that left a merged region can leave the rest of it in pieces;
  // each piece of a label the groups touched becomes its own object.
  std::vector<bool> touched(65536, false);
  for (std::size_t g = 0; g < active.size(); ++g) {
    touched[assigned[g]] = true;
    for (const auto& p : seeds[g]) touched[projected[p]] = true;
  }
  touched[0] = false;
  split_disconnected(out, touched, seed_px, cfg.min_region, max_label);
  absorb_small_regions(out, cfg.min_region, &seed_px);
  return out;
}

}  // namespace riseg

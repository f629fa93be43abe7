#include "riseg/planner.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "riseg/rng.hpp"

namespace riseg {
namespace {

double dist(const PixelCoord& a, const PixelCoord& b) { return std::hypot(a.row - b.row, a.col - b.col); }

double point_segment(const PixelCoord& p, const PixelCoord& a, const PixelCoord& b) {
  const double er = b.row - a.row, ec = b.col - a.col;
  const double len2 = er * er + ec * ec;
  double t = len2 > 0.0 ? ((p.row - a.row) * er + (p.col - a.col) * ec) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, {a.row + t * er, a.col + t * ec});
}

}  // namespace

std::vector<PixelIndex> threshold_pixels(const UncertaintyMap& u, int lo, int hi) {
  std::vector<PixelIndex> out;
  for (int r = 0; r < u.rows(); ++r)
    for (int c = 0; c < u.cols(); ++c) {
      const int v = u(r, c);
      if (v >= lo && v < hi) out.push_back({r, c});
    }
  return out;
}

std::optional<PushAction> find_action(const UncertaintyMap& u, const PlannerConfig& cfg, std::uint64_t seed,
                                      PlanTrace* trace, const LabelMask* split) {
  PlanTrace local;
  PlanTrace& tr = trace ? *trace : local;

  const auto certain_px = threshold_pixels(u, cfg.l_u, 256);
  const auto uncertain_px = threshold_pixels(u, cfg.l_l, cfg.l_u);
  if (certain_px.size() < 2 || uncertain_px.empty()) return std::nullopt;

  ElbowOptions elbow;
  elbow.k_max = cfg.k_max;
  elbow.min_split_gain = cfg.min_split_gain;
  elbow.rule = cfg.elbow_rule;
  elbow.split_gain = cfg.split_gain;
  tr.certain = kmeans_elbow(certain_px, ClusterKind::Certain, derive_seed({seed, 1}), elbow);
  tr.uncertain = kmeans_elbow(uncertain_px, ClusterKind::Uncertain, derive_seed({seed, 2}), elbow);
  const auto& cc = tr.certain->centers;
  const auto& uc = tr.uncertain->centers;

  const auto label_at = [&](const PixelCoord& p) -> Label {
    const int r = static_cast<int>(std::lround(p.row)), c = static_cast<int>(std::lround(p.col));
    return split && split->contains(r, c) ? (*split)(r, c) : 0;
  };

  // argmin over ordered pairs of center separation subject to both gates;
  // ties resolve to the first pair in (i, j) order.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(cc.size()); ++i) {
    for (int j = 0; j < static_cast<int>(cc.size()); ++j) {
      if (i == j) continue;
      const double sep = dist(cc[i], cc[j]) * cfg.pixel_pitch;
      if (sep > cfg.d_a || sep >= best) continue;
      const Label li = label_at(cc[i]), lj = label_at(cc[j]);
      if (li != 0 && lj != 0 && li != lj) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& c : uc) nearest = std::min(nearest, point_segment(c, cc[i], cc[j]));
      if (nearest * cfg.pixel_pitch > cfg.d_b) continue;
      best = sep;
      tr.pair_i = i;
      tr.pair_j = j;
    }
  }
  if (tr.pair_i < 0) return std::nullopt;

  // Boundary of cluster i*: member pixels with a 4-neighbour outside it.
  Grid<int> owner(u.rows(), u.cols(), -1);
  const auto& members = tr.certain->pixels;
  for (std::size_t k = 0; k < members.size(); ++k) owner[members[k]] = tr.certain->assignment[k];
  constexpr int kDr[4] = {-1, 1, 0, 0};
  constexpr int kDc[4] = {0, 0, -1, 1};
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (tr.certain->assignment[k] != tr.pair_i) continue;
    const PixelIndex p = members[k];
    for (int n = 0; n < 4; ++n) {
      const int r = p.row + kDr[n], c = p.col + kDc[n];
      if (!owner.contains(r, c) || owner(r, c) != tr.pair_i) {
        tr.boundary.push_back(p);
        break;
      }
    }
  }

  const PixelCoord ci = cc[tr.pair_i];
  const PixelCoord cj = cc[tr.pair_j];
  const double axis_r = cj.row - ci.row, axis_c = cj.col - ci.col;
  const double axis_len = std::hypot(axis_r, axis_c);
  const double max_cos = std::sin(cfg.perp_tol_deg * std::numbers::pi / 180.0);
  for (const auto& p : tr.boundary) {
    const double vr = ci.row - p.row, vc = ci.col - p.col;
    const double len = std::hypot(vr, vc);
    if (len == 0.0) continue;
    const double cosine = (vr * axis_r + vc * axis_c) / (len * axis_len);
    if (std::abs(cosine) <= max_cos) tr.candidates.push_back(p);
  }
  if (tr.candidates.empty()) return std::nullopt;

  Rng rng(derive_seed({seed, 3}));
  const PixelIndex pick = tr.candidates[uniform_index(rng, tr.candidates.size())];
  const double vr = ci.row - pick.row, vc = ci.col - pick.col;
  const double len = std::hypot(vr, vc);
  return PushAction{pick, {vr / len, vc / len}, cfg.d_push};
}

}  // namespace riseg

#include "riseg/metrics.hpp"

#include <algorithm>

#include "riseg/errors.hpp"
#include "riseg/hungarian.hpp"

namespace riseg {
namespace {

void require_same_shape(const LabelMask& a, const LabelMask& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::ShapeMismatch, "masks differ in shape");
}

struct Matching {
  OverlapTable table;
  std::vector<int> gt_of_pred;  // index into gt_labels or -1
};

Matching match(const LabelMask& pred, const LabelMask& gt) {
  Matching m{overlap_table(pred, gt), {}};
  const auto& t = m.table;
  const int rows = static_cast<int>(t.pred_labels.size());
  const int cols = static_cast<int>(t.gt_labels.size());
  std::vector<double> cost(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) cost[static_cast<std::size_t>(i) * cols + j] = -t.pair_f(i, j);
  m.gt_of_pred = solve_assignment(cost, rows, cols);
  for (int i = 0; i < rows; ++i)
    if (m.gt_of_pred[i] >= 0 && t.inter(i, m.gt_of_pred[i]) == 0) m.gt_of_pred[i] = -1;
  return m;
}

// Distance transform would be overkill for tol of a pixel or two.
bool near(const Grid<std::uint8_t>& b, int r, int c, int tol) {
  for (int dr = -tol; dr <= tol; ++dr)
    for (int dc = -tol; dc <= tol; ++dc)
      if (b.contains(r + dr, c + dc) && b(r + dr, c + dc)) return true;
  return false;
}

}  // namespace

double f_measure(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

double OverlapTable::pair_f(std::size_t i, std::size_t j) const {
  const long n = inter(i, j);
  if (n == 0) return 0.0;
  return 2.0 * static_cast<double>(n) / static_cast<double>(pred_size[i] + gt_size[j]);
}

OverlapTable overlap_table(const LabelMask& pred, const LabelMask& gt) {
  require_same_shape(pred, gt);
  OverlapTable t;
  t.pred_labels = positive_labels(pred);
  t.gt_labels = positive_labels(gt);
  const std::size_t np = t.pred_labels.size(), ng = t.gt_labels.size();
  std::vector<int> pred_index(65536, -1), gt_index(65536, -1);
  for (std::size_t i = 0; i < np; ++i) pred_index[t.pred_labels[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < ng; ++j) gt_index[t.gt_labels[j]] = static_cast<int>(j);
  t.pred_size.assign(np, 0);
  t.gt_size.assign(ng, 0);
  t.intersection.assign(np * ng, 0);
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const int i = pred_index[pred.data()[k]];
    const int j = gt_index[gt.data()[k]];
    if (i >= 0) ++t.pred_size[i];
    if (j >= 0) ++t.gt_size[j];
    if (i >= 0 && j >= 0) ++t.intersection[i * ng + j];
  }
  return t;
}

std::map<Label, Label> match_objects(const LabelMask& pred, const LabelMask& gt) {
  const Matching m = match(pred, gt);
  std::map<Label, Label> out;
  for (std::size_t i = 0; i < m.gt_of_pred.size(); ++i)
    if (m.gt_of_pred[i] >= 0) out[m.table.pred_labels[i]] = m.table.gt_labels[m.gt_of_pred[i]];
  return out;
}

PRF overlap_prf(const LabelMask& pred, const LabelMask& gt) {
  const Matching m = match(pred, gt);
  const auto& t = m.table;
  long hit = 0, pred_total = 0, gt_total = 0;
  for (std::size_t i = 0; i < t.pred_labels.size(); ++i) {
    pred_total += t.pred_size[i];
    if (m.gt_of_pred[i] >= 0) hit += t.inter(i, m.gt_of_pred[i]);
  }
  for (long s : t.gt_size) gt_total += s;
  PRF out;
  out.p = pred_total > 0 ? static_cast<double>(hit) / pred_total : 0.0;
  out.r = gt_total > 0 ? static_cast<double>(hit) / gt_total : 0.0;
  out.f = f_measure(out.p, out.r);
  return out;
}

Grid<std::uint8_t> region_boundary(const LabelMask& mask, Label label) {
  Grid<std::uint8_t> b(mask.rows(), mask.cols(), 0);
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (mask(r, c) != label) continue;
      const bool edge = r == 0 || c == 0 || r == mask.rows() - 1 || c == mask.cols() - 1 ||
                        mask(r - 1, c) != label || mask(r + 1, c) != label || mask(r, c - 1) != label ||
                        mask(r, c + 1) != label;
      b(r, c) = edge ? 1 : 0;
    }
  }
  return b;
}

PRF boundary_prf(const LabelMask& pred, const LabelMask& gt, int tol_px) {
  if (tol_px < 0) throw Error(ErrorCode::InvalidConfig, "boundary tolerance must be non-negative");
  const Matching m = match(pred, gt);
  const auto& t = m.table;
  long pred_hit = 0, pred_total = 0, gt_hit = 0, gt_total = 0;
  std::vector<Grid<std::uint8_t>> gt_boundary;
  for (Label g : t.gt_labels) {
    gt_boundary.push_back(region_boundary(gt, g));
    gt_total += std::count(gt_boundary.back().data().begin(), gt_boundary.back().data().end(), 1);
  }
  for (std::size_t i = 0; i < t.pred_labels.size(); ++i) {
    const auto pb = region_boundary(pred, t.pred_labels[i]);
    pred_total += std::count(pb.data().begin(), pb.data().end(), 1);
    const int j = m.gt_of_pred[i];
    if (j < 0) continue;
    const auto& gb = gt_boundary[j];
    for (int r = 0; r < pred.rows(); ++r) {
      for (int c = 0; c < pred.cols(); ++c) {
        if (pb(r, c) && near(gb, r, c, tol_px)) ++pred_hit;
        if (gb(r, c) && near(pb, r, c, tol_px)) ++gt_hit;
      }
    }
  }
  PRF out;
  out.p = pred_total > 0 ? static_cast<double>(pred_hit) / pred_total : 0.0;
  out.r = gt_total > 0 ? static_cast<double>(gt_hit) / gt_total : 0.0;
  out.f = f_measure(out.p, out.r);
  return out;
}

double object_accuracy(const LabelMask& pred, const LabelMask& gt) {
  const Matching m = match(pred, gt);
  const auto& t = m.table;
  if (t.gt_labels.empty()) throw Error(ErrorCode::NoGtObjects, "ground truth has no objects");
  int ok = 0;
  for (std::size_t i = 0; i < t.pred_labels.size(); ++i) {
    const int j = m.gt_of_pred[i];
    if (j >= 0 && t.pair_f(i, j) >= 0.75) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(t.gt_labels.size());
}

MetricsReport evaluate(const LabelMask& pred, const LabelMask& gt, int boundary_tol_px) {
  MetricsReport rep;
  const PRF o = overlap_prf(pred, gt);
  const PRF b = boundary_prf(pred, gt, boundary_tol_px);
  rep.overlap_p = o.p, rep.overlap_r = o.r, rep.overlap_f = o.f;
  rep.boundary_p = b.p, rep.boundary_r = b.r, rep.boundary_f = b.f;
  rep.object_accuracy = object_accuracy(pred, gt);
  rep.n_gt_objects = static_cast<int>(positive_labels(gt).size());
  rep.n_pred_objects = static_cast<int>(positive_labels(pred).size());
  return rep;
}

}  // namespace riseg

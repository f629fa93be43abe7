#pragma once

#include <map>
#include <vector>

#include "riseg/raster.hpp"

namespace riseg {

struct PRF {
  double p = 0.0;
  double r = 0.0;
  double f = 0.0;

  friend bool operator==(const PRF&, const PRF&) = default;
};

/// 2PR/(P+R), 0 when both are 0.
double f_measure(double p, double r);

/// Pixel counts of every label pair; the input of matching and overlap scores.
struct OverlapTable {
  std::vector<Label> pred_labels;  // ascending, positive
  std::vector<Label> gt_labels;
  std::vector<long> pred_size;
  std::vector<long> gt_size;
  std::vector<long> intersection;  // pred x gt, row-major

  long inter(std::size_t i, std::size_t j) const { return intersection[i * gt_labels.size() + j]; }
  /// Pairwise Overlap F of prediction i against ground truth j.
  double pair_f(std::size_t i, std::size_t j) const;
};

OverlapTable overlap_table(const LabelMask& pred, const LabelMask& gt);

/// Hungarian matching maximising the total pairwise Overlap F; pairs with
/// F = 0 are dropped. Keys are predicted labels, values ground-truth labels.
std::map<Label, Label> match_objects(const LabelMask& pred, const LabelMask& gt);

PRF overlap_prf(const LabelMask& pred, const LabelMask& gt);

/// Boundary precision/recall on matched pairs. A predicted boundary pixel is a
/// hit when a boundary pixel of its matched ground-truth object lies within
/// Chebyshev distance tol_px; recall counts ground-truth boundary pixels near
/// the matched prediction's boundary the same way.
PRF boundary_prf(const LabelMask& pred, const LabelMask& gt, int tol_px = 1);

/// Fraction of ground-truth objects whose match reaches Overlap F >= 0.75.
/// Throws NoGtObjects.
double object_accuracy(const LabelMask& pred, const LabelMask& gt);

/// Pixels of `label` with a 4-neighbour outside the region or the image.
Grid<std::uint8_t> region_boundary(const LabelMask& mask, Label label);

struct MetricsReport {
  double overlap_p = 0.0, overlap_r = 0.0, overlap_f = 0.0;
  double boundary_p = 0.0, boundary_r = 0.0, boundary_f = 0.0;
  double object_accuracy = 0.0;
  int n_gt_objects = 0;
  int n_pred_objects = 0;
};

MetricsReport evaluate(const LabelMask& pred, const LabelMask& gt, int boundary_tol_px = 1);

}  // namespace riseg

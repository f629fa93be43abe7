#include "riseg/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "riseg/errors.hpp"
#include "riseg/rng.hpp"

namespace riseg {
namespace {

double sq_dist(const PixelCoord& a, const PixelCoord& b) {
  const double dr = a.row - b.row, dc = a.col - b.col;
  return dr * dr + dc * dc;
}

std::vector<PixelCoord> plus_plus_init(std::span<const PixelCoord> pts, int k, Rng& rng) {
  std::vector<PixelCoord> centers;
  centers.push_back(pts[uniform_index(rng, pts.size())]);
  std::vector<double> d2(pts.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d2[i] = std::min(d2[i], sq_dist(pts[i], centers.back()));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (pick = 0; pick + 1 < pts.size(); ++pick) {
        target -= d2[pick];
        if (target < 0.0) break;
      }
    } else {
      pick = uniform_index(rng, pts.size());
    }
    centers.push_back(pts[pick]);
  }
  return centers;
}

KMeansResult lloyd(std::span<const PixelCoord> pts, std::vector<PixelCoord> centers, const KMeansOptions& opts) {
  const int k = static_cast<int>(centers.size());
  KMeansResult res;
  res.assignment.assign(pts.size(), 0);
  std::vector<double> best_d2(pts.size());
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(pts[i], centers[c]);
        if (d < best) best = d, arg = c;
      }
      res.assignment[i] = arg;
      best_d2[i] = best;
    }
    std::vector<double> sr(k, 0.0), sc(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const int a = res.assignment[i];
      sr[a] += pts[i].row;
      sc[a] += pts[i].col;
      ++count[a];
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      PixelCoord next = centers[c];
      if (count[c] > 0) {
        next = {sr[c] / count[c], sc[c] / count[c]};
      } else {
        // Empty cluster: restart it on the worst-fit point.
        const auto far = std::max_element(best_d2.begin(), best_d2.end()) - best_d2.begin();
        next = pts[far];
        best_d2[far] = 0.0;
      }
      shift = std::max(shift, std::sqrt(sq_dist(next, centers[c])));
      centers[c] = next;
    }
    if (shift <= opts.tolerance) break;
  }
  // Final assignment against the converged centers.
  res.inertia = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int c = 0; c < k; ++c) {
      const double d = sq_dist(pts[i], centers[c]);
      if (d < best) best = d, arg = c;
    }
    res.assignment[i] = arg;
    res.inertia += best;
  }
  res.centers = std::move(centers);
  return res;
}

}  // namespace

KMeansResult kmeans(std::span<const PixelCoord> points, int k, std::uint64_t seed, const KMeansOptions& opts) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "k-means on no points");
  if (k < 1 || static_cast<std::size_t>(k) > points.size()) {
    throw Error(ErrorCode::InvalidConfig, "k out of range");
  }
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r)}));
    KMeansResult res = lloyd(points, plus_plus_init(points, k, rng), opts);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

ClusterSet kmeans_elbow(std::span<const PixelIndex> pixels, ClusterKind kind, std::uint64_t seed,
                        const ElbowOptions& opts) {
  if (pixels.empty()) throw Error(ErrorCode::EmptyInput, "no pixels to cluster");
  std::vector<PixelCoord> pts;
  pts.reserve(pixels.size());
  for (const auto& p : pixels) pts.push_back({double(p.row), double(p.col)});

  const int k_top = std::min<int>(std::max(1, opts.k_max), static_cast<int>(pts.size()));
  std::vector<KMeansResult> runs;
  ClusterSet out;
  out.kind = kind;
  out.pixels.assign(pixels.begin(), pixels.end());
  for (int k = 1; k <= k_top; ++k) {
    runs.push_back(kmeans(pts, k, seed, opts.kmeans));
    out.inertia_curve.push_back(runs.back().inertia);
  }
  const auto& I = out.inertia_curve;

  int chosen = 1;
  const bool splits = k_top >= 2 && I[0] > 0.0 && (I[0] - I[1]) / I[0] >= opts.min_split_gain;
  if (splits && opts.rule == ElbowRule::LastSignificantGain) {
    chosen = 2;
    for (int k = 3; k <= k_top; ++k)
      if (I[k - 2] > 0.0 && (I[k - 2] - I[k - 1]) / I[k - 2] >= opts.split_gain) chosen = k;
  } else if (splits && opts.rule == ElbowRule::MarginalGain) {
    chosen = 2;
    while (chosen < k_top && I[chosen - 1] > 0.0 && (I[chosen - 1] - I[chosen]) / I[chosen - 1] >= opts.split_gain) {
      ++chosen;
    }
  } else if (splits) {
    chosen = 2;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 2; k < k_top; ++k) {
      const double curvature = I[k - 2] - 2.0 * I[k - 1] + I[k];
      if (curvature > best) best = curvature, chosen = k;
    }
  }
  out.centers = runs[chosen - 1].centers;
  out.assignment = runs[chosen - 1].assignment;
  return out;
}

}  // namespace riseg

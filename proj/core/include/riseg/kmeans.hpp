#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "riseg/raster.hpp"

namespace riseg {

struct KMeansResult {
  std::vector<PixelCoord> centers;
  std::vector<int> assignment;  // per input point
  double inertia = 0.0;         // sum of squared distances to assigned centers
  int iterations = 0;
};

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;  // max center shift, pixels
  int restarts = 3;         // best-of by inertia
};

/// Lloyd's algorithm with k-means++ seeding. Requires 1 <= k <= points.size().
KMeansResult kmeans(std::span<const PixelCoord> points, int k, std::uint64_t seed, const KMeansOptions& opts = {});

enum class ClusterKind { Certain, Uncertain };

struct ClusterSet {
  ClusterKind kind = ClusterKind::Certain;
  std::vector<PixelIndex> pixels;
  std::vector<PixelCoord> centers;
  std::vector<int> assignment;       // cluster index per entry of `pixels`
  std::vector<double> inertia_curve;  // inertia for k = 1..K
};

enum class ElbowRule {
  /// Maximum discrete curvature I(k-1) - 2 I(k) + I(k+1), ties to smaller k.
  Curvature,
  /// Smallest k whose next split removes less than split_gain of I(k).
  MarginalGain,
  /// Largest k reached by a split that removed at least split_gain of the
  /// inertia before it. Later small gains do not stop the search.
  LastSignificantGain,
};

struct ElbowOptions {
  int k_max = 8;
  ElbowRule rule = ElbowRule::LastSignificantGain;
  /// k = 1 is kept when splitting in two removes less than this fraction of
  /// the k = 1 inertia (a single compact blob). Applies to every rule.
  double min_split_gain = 0.4;
  double split_gain = 0.3;
  KMeansOptions kmeans;
};

/// Runs k-means for k in 1..min(k_max, |pixels|) and keeps the k picked by
/// `rule` on the inertia curve. Throws EmptyInput.
ClusterSet kmeans_elbow(std::span<const PixelIndex> pixels, ClusterKind kind, std::uint64_t seed,
                        const ElbowOptions& opts = {});

}  // namespace riseg

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riseg/frames.hpp"
#include "riseg/se3.hpp"

namespace riseg {

/// How two BFIFs are compared.
enum class FeatureMode : std::uint32_t {
  /// (|Δω|, |Δv|): rotation and translation disagreement.
  NormSplit = 0,
  /// Component-wise |Δ| of the 6-vectors.
  Raw6 = 1,
};

int feature_dim(FeatureMode mode);

/// diff(V_i, V_j); symmetric in its arguments by construction.
std::vector<double> pair_feature(const se3::Twist& a, const se3::Twist& b, FeatureMode mode = FeatureMode::NormSplit);

/// Gaussian product-kernel density estimate.
class KernelDensity {
 public:
  KernelDensity() = default;
  KernelDensity(int dim, std::vector<double> samples, std::vector<double> bandwidth);

  int dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return dim_ > 0 ? samples_.size() / dim_ : 0; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  const std::vector<double>& bandwidth() const noexcept { return bandwidth_; }

  double log_density(std::span<const double> y) const;
  double density(std::span<const double> y) const;

  friend bool operator==(const KernelDensity&, const KernelDensity&) = default;

 private:
  int dim_ = 0;
  std::vector<double> samples_;  // row-major count x dim
  std::vector<double> bandwidth_;
  double log_norm_ = 0.0;
};

struct KdeConfig {
  FeatureMode mode = FeatureMode::NormSplit;
  /// Per-dimension override of Silverman's rule; applied to both classes.
  std::optional<std::vector<double>> bandwidth;
  double min_bandwidth = 1e-6;
  /// Stored kernels per class; larger populations are subsampled.
  int max_samples_per_class = 2000;
  int min_pairs_per_class = 50;
};

struct GroupingModel {
  FeatureMode mode = FeatureMode::NormSplit;
  KernelDensity same;
  KernelDensity diff;
  double prior_same = 0.5;
  std::uint64_t same_pairs = 0;
  std::uint64_t diff_pairs = 0;
  /// Free-form JSON describing how the model was trained.
  std::string metadata = "{}";

  friend bool operator==(const GroupingModel&, const GroupingModel&) = default;
};

/// P(same body | feature) by Bayes' rule on the two class densities. Returns
/// prior_same when both densities fall below 1e-300.
double posterior_same(const GroupingModel& model, std::span<const double> feature);

/// Fits both class densities. Features are sorted before subsampling so the
/// result does not depend on input order. Throws ClassStarvation.
GroupingModel fit_grouping_model(std::vector<std::vector<double>> same, std::vector<std::vector<double>> diff,
                                 const KdeConfig& cfg, std::uint64_t seed);

/// One simulated step with ground truth: labels at t and the flow t -> t+1.
struct TrainingStep {
  LabelMask truth;
  FlowField flow;
  RasterGeometry geometry;
};

/// Samples frames on the ground-truth mask of every step, labels each pair of
/// moving frames by whether they sit on the same body, and fits the model.
GroupingModel train_grouping_model(std::span<const TrainingStep> steps, const SamplerConfig& sampler,
                                   const KdeConfig& cfg, std::uint64_t seed,
                                   se3::TwistMethod method = se3::TwistMethod::MatrixLog);

/// Versioned little-endian binary, magic "RISKDE1".
void save_model(const std::filesystem::path& path, const GroupingModel& model);
GroupingModel load_model(const std::filesystem::path& path);

}  // namespace riseg

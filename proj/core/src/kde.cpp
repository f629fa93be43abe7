#include "riseg/kde.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>

#include "riseg/errors.hpp"
#include "riseg/rng.hpp"

namespace riseg {

int feature_dim(FeatureMode mode) { return mode == FeatureMode::Raw6 ? 6 : 2; }

std::vector<double> pair_feature(const se3::Twist& a, const se3::Twist& b, FeatureMode mode) {
  if (mode == FeatureMode::Raw6) {
    const auto d = (a.vector() - b.vector()).cwiseAbs();
    return {d.begin(), d.end()};
  }
  return {(a.angular - b.angular).norm(), (a.linear - b.linear).norm()};
}

KernelDensity::KernelDensity(int dim, std::vector<double> samples, std::vector<double> bandwidth)
    : dim_(dim), samples_(std::move(samples)), bandwidth_(std::move(bandwidth)) {
  log_norm_ = -0.5 * dim_ * std::log(2.0 * std::numbers::pi);
  for (double h : bandwidth_) log_norm_ -= std::log(h);
  if (count() > 0) log_norm_ -= std::log(static_cast<double>(count()));
}

double KernelDensity::log_density(std::span<const double> y) const {
  const std::size_t n = count();
  if (n == 0) return -std::numeric_limits<double>::infinity();
  // log-sum-exp over kernels
  thread_local std::vector<double> expo;
  expo.resize(n);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double q = 0.0;
    const double* x = &samples_[i * dim_];
    for (int d = 0; d < dim_; ++d) {
      const double z = (y[d] - x[d]) / bandwidth_[d];
      q += z * z;
    }
    expo[i] = -0.5 * q;
    peak = std::max(peak, expo[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(expo[i] - peak);
  return log_norm_ + peak + std::log(sum);
}

double KernelDensity::density(std::span<const double> y) const { return std::exp(log_density(y)); }

double posterior_same(const GroupingModel& model, std::span<const double> feature) {
  static const double kFloor = std::log(1e-300);
  const double ls = model.same.log_density(feature);
  const double ld = model.diff.log_density(feature);
  if (ls < kFloor && ld < kFloor) return model.prior_same;
  const double log_odds_diff = ld + std::log1p(-model.prior_same) - ls - std::log(model.prior_same);
  if (log_odds_diff > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(log_odds_diff));
}

namespace {

KernelDensity fit_class(std::vector<std::vector<double>> rows, int dim, const KdeConfig& cfg, Rng& rng) {
  std::sort(rows.begin(), rows.end());
  const std::size_t keep = std::min<std::size_t>(rows.size(), static_cast<std::size_t>(cfg.max_samples_per_class));
  if (keep < rows.size()) {
    // Seeded partial shuffle of the sorted list, then restore sorted order.
    for (std::size_t i = 0; i < keep; ++i) std::swap(rows[i], rows[i + uniform_index(rng, rows.size() - i)]);
    rows.resize(keep);
    std::sort(rows.begin(), rows.end());
  }
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());

  std::vector<double> h(dim);
  const double n = static_cast<double>(rows.size());
  // Silverman's rule for a d-dimensional product kernel.
  const double factor = std::pow(4.0 / ((dim + 2.0) * n), 1.0 / (dim + 4.0));
  for (int d = 0; d < dim; ++d) {
    if (cfg.bandwidth) {
      h[d] = (*cfg.bandwidth)[d];
    } else {
      double mean = 0.0;
      for (const auto& r : rows) mean += r[d];
      mean /= n;
      double var = 0.0;
      for (const auto& r : rows) var += (r[d] - mean) * (r[d] - mean);
      var /= std::max(1.0, n - 1.0);
      h[d] = std::sqrt(var) * factor;
    }
    h[d] = std::max(h[d], cfg.min_bandwidth);
  }
  return KernelDensity(dim, std::move(flat), std::move(h));
}

template <typename T>
void put(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error(ErrorCode::Io, "truncated model file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

constexpr char kMagic[7] = {'R', 'I', 'S', 'K', 'D', 'E', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void put_density(std::ostream& out, const KernelDensity& k) {
  for (double h : k.bandwidth()) put<double>(out, h);
  put<std::uint64_t>(out, k.count());
  for (double v : k.samples()) put<double>(out, v);
}

KernelDensity get_density(std::istream& in, int dim) {
  std::vector<double> h(dim);
  for (auto& v : h) v = get<double>(in);
  const auto n = get<std::uint64_t>(in);
  if (n > (1ULL << 32)) throw Error(ErrorCode::Io, "implausible kernel count");
  std::vector<double> s(n * dim);
  for (auto& v : s) v = get<double>(in);
  return KernelDensity(dim, std::move(s), std::move(h));
}

}  // namespace

GroupingModel fit_grouping_model(std::vector<std::vector<double>> same, std::vector<std::vector<double>> diff,
                                 const KdeConfig& cfg, std::uint64_t seed) {
  const auto min_pairs = static_cast<std::size_t>(cfg.min_pairs_per_class);
  if (same.size() < min_pairs || diff.size() < min_pairs) {
    throw Error(ErrorCode::ClassStarvation, "same=" + std::to_string(same.size()) + " diff=" + std::to_string(diff.size()));
  }
  const int dim = feature_dim(cfg.mode);
  if (cfg.bandwidth && static_cast<int>(cfg.bandwidth->size()) != dim) {
    throw Error(ErrorCode::InvalidConfig, "bandwidth override has wrong dimension");
  }
  for (const auto* set : {&same, &diff})
    for (const auto& row : *set)
      if (static_cast<int>(row.size()) != dim) throw Error(ErrorCode::InvalidConfig, "feature dimension mismatch");

  GroupingModel model;
  model.mode = cfg.mode;
  model.same_pairs = same.size();
  model.diff_pairs = diff.size();
  model.prior_same = static_cast<double>(same.size()) / static_cast<double>(same.size() + diff.size());
  Rng rng(derive_seed({seed, 0x6b6465ULL}));
  model.same = fit_class(std::move(same), dim, cfg, rng);
  model.diff = fit_class(std::move(diff), dim, cfg, rng);
  return model;
}

GroupingModel train_grouping_model(std::span<const TrainingStep> steps, const SamplerConfig& sampler,
                                   const KdeConfig& cfg, std::uint64_t seed, se3::TwistMethod method) {
  std::vector<std::vector<double>> same, diff;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const TrainingStep& step = steps[s];
    FramePairs frames;
    try {
      frames = sample_frames(step.truth, step.flow, step.geometry, sampler, derive_seed({seed, s}));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InsufficientFrames) continue;
      throw;
    }
    const auto twists = compute_bfifs(frames.at_t, frames.at_t1, method);
    std::vector<std::size_t> moving;
    for (std::size_t i = 0; i < twists.size(); ++i)
      if (frames.at_t[i].mean_anchor_shift(frames.at_t1[i]) >= sampler.move_eps) moving.push_back(i);
    for (std::size_t a = 0; a < moving.size(); ++a) {
      for (std::size_t b = a + 1; b < moving.size(); ++b) {
        const auto i = moving[a], j = moving[b];
        auto f = pair_feature(twists[i], twists[j], cfg.mode);
        (frames.at_t[i].object_hint == frames.at_t[j].object_hint ? same : diff).push_back(std::move(f));
      }
    }
  }
  return fit_grouping_model(std::move(same), std::move(diff), cfg, seed);
}

void save_model(const std::filesystem::path& path, const GroupingModel& model) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.mode));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.same.dim()));
  put<double>(out, model.prior_same);
  put<std::uint64_t>(out, model.same_pairs);
  put<std::uint64_t>(out, model.diff_pairs);
  put_density(out, model.same);
  put_density(out, model.diff);
  put<std::uint64_t>(out, model.metadata.size());
  out.write(model.metadata.data(), static_cast<std::streamsize>(model.metadata.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

GroupingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::Io, path.string() + " is not a RISKDE1 model");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kFormatVersion) throw Error(ErrorCode::Io, "unsupported model version " + std::to_string(version));
  GroupingModel m;
  const auto mode = get<std::uint32_t>(in);
  if (mode > 1) throw Error(ErrorCode::Io, "unknown feature mode");
  m.mode = static_cast<FeatureMode>(mode);
  const auto dim = static_cast<int>(get<std::uint32_t>(in));
  if (dim != feature_dim(m.mode)) throw Error(ErrorCode::Io, "feature dimension mismatch");
  m.prior_same = get<double>(in);
  m.same_pairs = get<std::uint64_t>(in);
  m.diff_pairs = get<std::uint64_t>(in);
  m.same = get_density(in, dim);
  m.diff = get_density(in, dim);
  const auto len = get<std::uint64_t>(in);
  if (len > (1ULL << 24)) throw Error(ErrorCode::Io, "implausible metadata length");
  m.metadata.resize(len);
  if (!in.read(m.metadata.data(), static_cast<std::streamsize>(len))) throw Error(ErrorCode::Io, "truncated metadata");
  return m;
}

}  // namespace riseg

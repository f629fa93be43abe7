#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "riseg/correction.hpp"
#include "riseg/frames.hpp"
#include "riseg/kde.hpp"
#include "riseg/oracles.hpp"
#include "riseg/planner.hpp"
#include "riseg/scene.hpp"
#include "riseg/se3.hpp"

namespace riseg {

/// Settings used when generating training episodes for the grouping model.
struct TrainingConfig {
  int min_objects = 4;
  int max_objects = 6;
  int pushes_per_episode = 3;
};

struct RunConfig {
  PlannerConfig planner;
  SamplerConfig sampler;
  CorrectionConfig correction;
  StaticSegConfig static_seg;
  PushConfig push;
  GeneratorConfig generator;
  KdeConfig kde;
  TrainingConfig training;

  double noise_sigma = 0.3;  // pixels
  int max_pushes = 3;
  std::uint64_t master_seed = 0;
  /// Posterior threshold for linking two frames.
  double tau = 0.5;
  se3::TwistMethod twist_method = se3::TwistMethod::MatrixLog;
  int boundary_tol_px = 1;
  /// Plan on the static uncertainty map minus seams the accumulated mask has
  /// already split (see mask_resolved_seams).
  bool skip_resolved_seams = true;
  /// Optional default model for `run`; the command line takes precedence.
  std::string model_path;
};

/// Throws InvalidConfig on out-of-range values.
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

/// Missing keys keep their defaults; unknown keys and wrongly typed values
/// throw InvalidConfig. The result is validated.
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);

std::string to_string(se3::TwistMethod method);
se3::TwistMethod twist_method_from_string(const std::string& name);

}  // namespace riseg

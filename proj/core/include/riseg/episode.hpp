#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riseg/config.hpp"
#include "riseg/kde.hpp"
#include "riseg/metrics.hpp"
#include "riseg/oracles.hpp"
#include "riseg/scene.hpp"

namespace riseg {

/// One observation of an episode. Step 0 is the scene before any push; step
/// k > 0 follows the k-th push.
struct StepRecord {
  int push_index = 0;
  SceneState scene;
  LabelMask truth;
  StaticObservation observation;
  /// Push that led into this step (absent at step 0).
  std::optional<PushAction> incoming;
  /// Push planned from this step's uncertainty map; nullopt ends the episode
  /// or the push budget ran out.
  std::optional<PushAction> planned;
  FlowField flow;  // flow into this step; empty at step 0
  LabelMask riseg;
  MetricsReport static_metrics;
  MetricsReport riseg_metrics;
  int n_frames = 0;
  int n_groups = 0;
};

struct EpisodeRecord {
  std::string scene_id;
  std::vector<StepRecord> steps;
  /// Set when a module error aborted the episode after the recorded steps.
  std::optional<std::string> failure;
};

/// Copy of `u` with uncertain-band pixels zeroed wherever `labels` already
/// holds two objects within `radius` pixels: seams the accumulated mask has
/// resolved need no further push.
UncertaintyMap mask_resolved_seams(const UncertaintyMap& u, const LabelMask& labels, const PlannerConfig& cfg,
                                   int radius = 2);

/// Stable 64-bit hash of a scene id (FNV-1a), so seeds follow the id and not
/// the position in a suite.
std::uint64_t scene_key(const std::string& scene_id);

/// Observe, plan, push, re-observe, regroup and correct until the planner
/// returns no action or max_pushes is reached.
EpisodeRecord run_episode(const std::string& scene_id, const SceneState& scene, const GroupingModel& model,
                          const RunConfig& cfg);

struct MethodSummary {
  double overlap_p = 0, overlap_r = 0, overlap_f = 0;
  double boundary_p = 0, boundary_r = 0, boundary_f = 0;
  double object_accuracy = 0;
};

struct SuiteReport {
  int episodes = 0;
  int failed = 0;
  /// Means per push index 0..max_pushes over completed episodes. An episode
  /// that stopped early contributes its last step to later indices.
  std::vector<MethodSummary> static_per_push;
  std::vector<MethodSummary> riseg_per_push;
  MethodSummary static_final;
  MethodSummary riseg_final;
  double mean_pushes = 0;
};

SuiteReport summarize(const std::vector<EpisodeRecord>& episodes, int max_pushes);
nlohmann::json to_json(const SuiteReport& report);

/// CSV header plus one row per step and method, fixed six-decimal precision.
std::string metrics_csv(const std::vector<EpisodeRecord>& episodes);

/// Sorted *.json scene files of a suite directory.
std::vector<std::filesystem::path> list_suite(const std::filesystem::path& dir);

/// Runs every scene and writes the run directory: per scene a folder with
/// scene_k.json, mask_gt_k.pgm, mask_static_k.pgm, mask_riseg_k.pgm,
/// uncertainty_k.pgm, flow_k.risflow (k >= 1) and action_k.json; at the top
/// level metrics.csv, summary.json and config_resolved.json. Scene ids are the
/// file stems. Throws EmptyInput for an empty suite.
SuiteReport run_suite(const std::vector<std::filesystem::path>& suite, const GroupingModel& model,
                      const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Writes `count` scenes named scene_NNNN.json with object counts drawn from
/// [min_objects, max_objects].
std::vector<std::filesystem::path> generate_suite(int count, int min_objects, int max_objects, std::uint64_t seed,
                                                  const std::filesystem::path& out_dir,
                                                  const GeneratorConfig& gen = {});

/// Simulated training steps: fresh scenes pushed by the planner, or by a
/// random push when the planner finds nothing.
std::vector<TrainingStep> simulate_training_steps(int episodes, std::uint64_t seed, const RunConfig& cfg);

GroupingModel train_command(int episodes, std::uint64_t seed, const RunConfig& cfg);

/// Recomputes metrics.csv content from the masks stored in a run directory.
std::string recompute_metrics(const std::filesystem::path& run_dir, int boundary_tol_px = 1);

}  // namespace riseg

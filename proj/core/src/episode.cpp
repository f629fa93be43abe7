#include "riseg/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "riseg/correction.hpp"
#include "riseg/errors.hpp"
#include "riseg/frames.hpp"
#include "riseg/grouping.hpp"
#include "riseg/io.hpp"
#include "riseg/planner.hpp"
#include "riseg/rng.hpp"

namespace riseg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Purpose tags for derive_seed so per-step streams never coincide.
enum Stream : std::uint64_t { kStatic = 11, kPlan = 12, kFlow = 13, kSample = 14, kScene = 21, kRandomPush = 22 };

// Flat action log; the three push fields are null when no push was planned.
json action_json(int push_index, const std::optional<PushAction>& a) {
  json j = {{"push_index", push_index}, {"contact_px", nullptr}, {"direction", nullptr}, {"distance_m", nullptr}};
  if (a) {
    j["contact_px"] = {a->contact_point.row, a->contact_point.col};
    j["direction"] = {a->direction.row, a->direction.col};
    j["distance_m"] = a->distance;
  }
  return j;
}

MethodSummary accumulate(const std::vector<const MetricsReport*>& reports) {
  MethodSummary s;
  if (reports.empty()) return s;
  for (const MetricsReport* r : reports) {
    s.overlap_p += r->overlap_p, s.overlap_r += r->overlap_r, s.overlap_f += r->overlap_f;
    s.boundary_p += r->boundary_p, s.boundary_r += r->boundary_r, s.boundary_f += r->boundary_f;
    s.object_accuracy += r->object_accuracy;
  }
  const double n = static_cast<double>(reports.size());
  s.overlap_p /= n, s.overlap_r /= n, s.overlap_f /= n;
  s.boundary_p /= n, s.boundary_r /= n, s.boundary_f /= n;
  s.object_accuracy /= n;
  return s;
}

json summary_json(const MethodSummary& s) {
  return {{"overlap_p", s.overlap_p},   {"overlap_r", s.overlap_r},   {"overlap_f", s.overlap_f},
          {"boundary_p", s.boundary_p}, {"boundary_r", s.boundary_r}, {"boundary_f", s.boundary_f},
          {"object_accuracy", s.object_accuracy}};
}

void csv_row(std::ostringstream& out, const std::string& scene, int step, const char* method,
             const MetricsReport& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", step, method, m.overlap_p,
                m.overlap_r, m.overlap_f, m.boundary_p, m.boundary_r, m.boundary_f, m.object_accuracy);
  out << scene << buf;
}

constexpr const char* kCsvHeader =
    "scene_id,push_index,method,overlap_p,overlap_r,overlap_f,boundary_p,boundary_r,boundary_f,object_acc\n";

std::string step_file(const char* stem, int k, const char* ext) {
  return std::string(stem) + "_" + std::to_string(k) + ext;
}

}  // namespace

UncertaintyMap mask_resolved_seams(const UncertaintyMap& u, const LabelMask& labels, const PlannerConfig& cfg,
                                   int radius) {
  UncertaintyMap out = u;
  for (int r = 0; r < u.rows(); ++r) {
    for (int c = 0; c < u.cols(); ++c) {
      if (u(r, c) < cfg.l_l || u(r, c) >= cfg.l_u) continue;
      Label first = 0;
      bool split = false;
      for (int dr = -radius; dr <= radius && !split; ++dr) {
        for (int dc = -radius; dc <= radius && !split; ++dc) {
          if (!labels.contains(r + dr, c + dc)) continue;
          const Label l = labels(r + dr, c + dc);
          if (l == 0) continue;
          if (first == 0) first = l;
          split = l != first;
        }
      }
      if (split) out(r, c) = 0;
    }
  }
  return out;
}

std::uint64_t scene_key(const std::string& scene_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : scene_id) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

EpisodeRecord run_episode(const std::string& scene_id, const SceneState& scene, const GroupingModel& model,
                          const RunConfig& cfg) {
  validate(cfg);
  EpisodeRecord rec{scene_id, {}, std::nullopt};
  const std::uint64_t key = scene_key(scene_id);
  // One static seed per scene: a merged pair stays merged while it touches.
  const std::uint64_t static_seed = derive_seed({cfg.master_seed, key, kStatic});
  const RasterGeometry geometry = scene.geometry();

  try {
    StepRecord first;
    first.scene = scene;
    first.truth = render_labels(scene);
    first.observation = oracle_static_seg(scene, cfg.static_seg, static_seed);
    first.riseg = first.observation.labels;
    first.static_metrics = evaluate(first.observation.labels, first.truth, cfg.boundary_tol_px);
    first.riseg_metrics = first.static_metrics;
    rec.steps.push_back(std::move(first));

    for (int k = 1; k <= cfg.max_pushes; ++k) {
      StepRecord& prev = rec.steps.back();
      const auto step_seed = [&](Stream s) { return derive_seed({cfg.master_seed, key, static_cast<std::uint64_t>(k), s}); };
      PlannerConfig planner = cfg.planner;
      planner.pixel_pitch = scene.pixel_pitch;
      const UncertaintyMap& u = cfg.skip_resolved_seams
                                    ? mask_resolved_seams(prev.observation.uncertainty, prev.riseg, cfg.planner)
                                    : prev.observation.uncertainty;
      prev.planned = find_action(u, planner, step_seed(kPlan), nullptr, cfg.skip_resolved_seams ? &prev.riseg : nullptr);
      if (!prev.planned) break;

      StepRecord next;
      next.push_index = k;
      next.incoming = prev.planned;
      try {
        next.scene = apply_push(prev.scene, *prev.planned, cfg.push);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoContact) throw;
        next.scene = prev.scene;  // the pusher met nothing
      }
      next.truth = render_labels(next.scene);
      next.observation = oracle_static_seg(next.scene, cfg.static_seg, static_seed);
      next.flow = oracle_flow(prev.scene, next.scene, cfg.noise_sigma, step_seed(kFlow));

      FrameGrouping grouping;
      FramePairs frames;
      try {
        frames = sample_frames(prev.riseg, next.flow, geometry, cfg.sampler, step_seed(kSample));
        const auto twists = compute_bfifs(frames.at_t, frames.at_t1, cfg.twist_method);
        grouping = group_bfifs(twists, frames.at_t, frames.at_t1, model, cfg.tau, cfg.sampler.move_eps);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientFrames) throw;
      }
      next.n_frames = static_cast<int>(frames.at_t.size());
      next.n_groups = static_cast<int>(grouping.groups.size());

      const Projection proj = project(prev.riseg, next.flow, next.observation.labels);
      next.riseg = correct_mask(proj.mask, next.observation.labels, grouping, frames.at_t1, proj.flow_t1,
                                cfg.correction, &frames.at_t);
      next.static_metrics = evaluate(next.observation.labels, next.truth, cfg.boundary_tol_px);
      next.riseg_metrics = evaluate(next.riseg, next.truth, cfg.boundary_tol_px);
      rec.steps.push_back(std::move(next));
    }
  } catch (const Error& e) {
    rec.failure = e.what();
  }
  return rec;
}

SuiteReport summarize(const std::vector<EpisodeRecord>& episodes, int max_pushes) {
  SuiteReport rep;
  rep.episodes = static_cast<int>(episodes.size());
  std::vector<const EpisodeRecord*> done;
  for (const auto& e : episodes) {
    if (e.failure || e.steps.empty()) {
      ++rep.failed;
    } else {
      done.push_back(&e);
    }
  }
  for (int k = 0; k <= max_pushes; ++k) {
    std::vector<const MetricsReport*> st, rs;
    for (const EpisodeRecord* e : done) {
      const auto& step = e->steps[std::min<std::size_t>(k, e->steps.size() - 1)];
      st.push_back(&step.static_metrics);
      rs.push_back(&step.riseg_metrics);
    }
    rep.static_per_push.push_back(accumulate(st));
    rep.riseg_per_push.push_back(accumulate(rs));
  }
  std::vector<const MetricsReport*> st, rs;
  double pushes = 0;
  for (const EpisodeRecord* e : done) {
    st.push_back(&e->steps.back().static_metrics);
    rs.push_back(&e->steps.back().riseg_metrics);
    pushes += static_cast<double>(e->steps.size() - 1);
  }
  rep.static_final = accumulate(st);
  rep.riseg_final = accumulate(rs);
  rep.mean_pushes = done.empty() ? 0.0 : pushes / static_cast<double>(done.size());
  return rep;
}

nlohmann::json to_json(const SuiteReport& r) {
  json per_push = json::array();
  for (std::size_t k = 0; k < r.static_per_push.size(); ++k) {
    per_push.push_back({{"push_index", k},
                        {"static", summary_json(r.static_per_push[k])},
                        {"riseg", summary_json(r.riseg_per_push[k])}});
  }
  return {{"episodes", r.episodes},
          {"failed", r.failed},
          {"mean_pushes", r.mean_pushes},
          {"per_push", per_push},
          {"final", {{"static", summary_json(r.static_final)}, {"riseg", summary_json(r.riseg_final)}}}};
}

std::string metrics_csv(const std::vector<EpisodeRecord>& episodes) {
  std::ostringstream out;
  out << kCsvHeader;
  for (const auto& e : episodes) {
    for (const auto& s : e.steps) {
      csv_row(out, e.scene_id, s.push_index, "static", s.static_metrics);
      csv_row(out, e.scene_id, s.push_index, "riseg", s.riseg_metrics);
    }
  }
  return out.str();
}

std::vector<fs::path> list_suite(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "suite directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

SuiteReport run_suite(const std::vector<fs::path>& suite, const GroupingModel& model, const RunConfig& cfg,
                      const fs::path& out_dir) {
  if (suite.empty()) throw Error(ErrorCode::EmptyInput, "empty scene suite");
  validate(cfg);
  fs::create_directories(out_dir);
  std::vector<EpisodeRecord> episodes;
  json failures = json::array();
  for (const auto& path : suite) {
    const std::string id = path.stem().string();
    EpisodeRecord rec;
    try {
      rec = run_episode(id, io::read_scene(path), model, cfg);
    } catch (const Error& e) {
      rec = EpisodeRecord{id, {}, std::string(e.what())};
    }
    const fs::path dir = out_dir / id;
    fs::create_directories(dir);
    for (const auto& s : rec.steps) {
      const int k = s.push_index;
      io::write_scene(dir / step_file("scene", k, ".json"), s.scene);
      io::write_pgm(dir / step_file("mask_gt", k, ".pgm"), s.truth);
      io::write_pgm(dir / step_file("mask_static", k, ".pgm"), s.observation.labels);
      io::write_pgm(dir / step_file("mask_riseg", k, ".pgm"), s.riseg);
      io::write_pgm(dir / step_file("uncertainty", k, ".pgm"), s.observation.uncertainty);
      if (k > 0) io::write_flow(dir / step_file("flow", k, ".risflow"), s.flow);
      json a = action_json(k, s.planned);
      a["frames"] = s.n_frames;
      a["groups"] = s.n_groups;
      io::write_text(dir / step_file("action", k, ".json"), a.dump(2) + "\n");
    }
    if (rec.failure) failures.push_back({{"scene_id", id}, {"reason", *rec.failure}});
    episodes.push_back(std::move(rec));
  }
  SuiteReport report = summarize(episodes, cfg.max_pushes);
  io::write_text(out_dir / "metrics.csv", metrics_csv(episodes));
  json summary = to_json(report);
  summary["master_seed"] = cfg.master_seed;
  summary["failures"] = failures;
  summary["model"] = {{"same_pairs", model.same_pairs}, {"diff_pairs", model.diff_pairs},
                      {"prior_same", model.prior_same}};
  io::write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  io::write_text(out_dir / "config_resolved.json", to_json(cfg).dump(2) + "\n");
  return report;
}

std::vector<fs::path> generate_suite(int count, int min_objects, int max_objects, std::uint64_t seed,
                                     const fs::path& out_dir, const GeneratorConfig& gen) {
  if (count < 1) throw Error(ErrorCode::InvalidConfig, "scene count must be positive");
  if (min_objects < 2 || min_objects > max_objects || max_objects > 8) {
    throw Error(ErrorCode::InvalidConfig, "object range must satisfy 2 <= min <= max <= 8");
  }
  fs::create_directories(out_dir);
  std::vector<fs::path> files;
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(i), kScene}));
    const int n = min_objects + static_cast<int>(uniform_index(rng, max_objects - min_objects + 1));
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d.json", i);
    const fs::path path = out_dir / name;
    io::write_scene(path, generate_scene(rng(), n, gen));
    files.push_back(path);
  }
  return files;
}

std::vector<TrainingStep> simulate_training_steps(int episodes, std::uint64_t seed, const RunConfig& cfg) {
  if (episodes < 1) throw Error(ErrorCode::InvalidConfig, "episode count must be positive");
  validate(cfg);
  std::vector<TrainingStep> steps;
  const auto& t = cfg.training;
  for (int e = 0; e < episodes; ++e) {
    const auto ep = static_cast<std::uint64_t>(e);
    Rng rng(derive_seed({seed, ep, kScene}));
    const int n = t.min_objects + static_cast<int>(uniform_index(rng, t.max_objects - t.min_objects + 1));
    SceneState scene = generate_scene(rng(), n, cfg.generator);
    const std::uint64_t static_seed = derive_seed({seed, ep, kStatic});
    for (int k = 1; k <= t.pushes_per_episode; ++k) {
      const auto step_seed = [&](Stream s) { return derive_seed({seed, ep, static_cast<std::uint64_t>(k), s}); };
      const LabelMask truth = render_labels(scene);
      const auto obs = oracle_static_seg(scene, cfg.static_seg, static_seed);
      PlannerConfig planner = cfg.planner;
      planner.pixel_pitch = scene.pixel_pitch;
      std::optional<PushAction> action = find_action(obs.uncertainty, planner, step_seed(kPlan));
      if (!action) {
        // Random push from inside a random body.
        Rng push_rng(step_seed(kRandomPush));
        std::vector<PixelIndex> pixels;
        const auto& body = scene.bodies[uniform_index(push_rng, scene.bodies.size())];
        for (int r = 0; r < truth.rows(); ++r)
          for (int c = 0; c < truth.cols(); ++c)
            if (truth(r, c) == body.id) pixels.push_back({r, c});
        if (pixels.empty()) continue;
        const double angle = uniform(push_rng, 0.0, 2.0 * M_PI);
        action = PushAction{pixels[uniform_index(push_rng, pixels.size())], {std::sin(angle), std::cos(angle)},
                            cfg.planner.d_push};
      }
      SceneState next;
      try {
        next = apply_push(scene, *action, cfg.push);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::NoContact) throw;
        continue;
      }
      steps.push_back({truth, oracle_flow(scene, next, cfg.noise_sigma, step_seed(kFlow)), scene.geometry()});
      scene = std::move(next);
    }
  }
  return steps;
}

GroupingModel train_command(int episodes, std::uint64_t seed, const RunConfig& cfg) {
  const auto steps = simulate_training_steps(episodes, seed, cfg);
  GroupingModel model = train_grouping_model(steps, cfg.sampler, cfg.kde, derive_seed({seed, 99}), cfg.twist_method);
  json meta = json::parse(model.metadata);
  meta["episodes"] = episodes;
  meta["seed"] = seed;
  meta["noise_sigma"] = cfg.noise_sigma;
  meta["twist_method"] = to_string(cfg.twist_method);
  model.metadata = meta.dump();
  return model;
}

std::string recompute_metrics(const fs::path& run_dir, int boundary_tol_px) {
  if (!fs::is_directory(run_dir)) throw Error(ErrorCode::Io, "run directory not found: " + run_dir.string());
  std::vector<fs::path> scenes;
  for (const auto& entry : fs::directory_iterator(run_dir))
    if (entry.is_directory()) scenes.push_back(entry.path());
  std::sort(scenes.begin(), scenes.end());
  std::ostringstream out;
  out << kCsvHeader;
  for (const auto& dir : scenes) {
    const std::string id = dir.filename().string();
    for (int k = 0; fs::exists(dir / step_file("mask_gt", k, ".pgm")); ++k) {
      const LabelMask gt = io::read_label_pgm(dir / step_file("mask_gt", k, ".pgm"));
      const LabelMask st = io::read_label_pgm(dir / step_file("mask_static", k, ".pgm"));
      const LabelMask rs = io::read_label_pgm(dir / step_file("mask_riseg", k, ".pgm"));
      csv_row(out, id, k, "static", evaluate(st, gt, boundary_tol_px));
      csv_row(out, id, k, "riseg", evaluate(rs, gt, boundary_tol_px));
    }
  }
  return out.str();
}

}  // namespace riseg

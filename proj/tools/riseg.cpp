// Command-line front end: scene generation, model training, suite runs and
// re-evaluation of stored runs.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <regex>
#include <string>

#include "CLI11.hpp"
#include "riseg/config.hpp"
#include "riseg/episode.hpp"
#include "riseg/errors.hpp"
#include "riseg/io.hpp"
#include "riseg/kde.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<double> noise_sigma;
  std::optional<int> max_pushes;
};

riseg::RunConfig resolve(const std::string& config_path, const Overrides& o) {
  riseg::RunConfig cfg = config_path.empty() ? riseg::RunConfig{} : riseg::load_config(config_path);
  if (o.noise_sigma) cfg.noise_sigma = *o.noise_sigma;
  if (o.max_pushes) cfg.max_pushes = *o.max_pushes;
  riseg::validate(cfg);
  return cfg;
}

// "4..6" or "5".
std::pair<int, int> parse_range(const std::string& text) {
  static const std::regex re(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw CLI::ValidationError("--objects", "expected N or LO..HI");
  const int lo = std::stoi(m[1]);
  const int hi = m[2].matched ? std::stoi(m[2]) : lo;
  return {lo, hi};
}

void print_summary(const riseg::SuiteReport& r) {
  std::printf("episodes %d (failed %d), mean pushes %.2f\n", r.episodes, r.failed, r.mean_pushes);
  std::printf("%-6s %-8s %9s %9s %9s\n", "push", "method", "overlap_f", "bound_f", "obj_acc");
  for (std::size_t k = 0; k < r.static_per_push.size(); ++k) {
    const auto& s = r.static_per_push[k];
    const auto& g = r.riseg_per_push[k];
    std::printf("%-6zu %-8s %9.4f %9.4f %9.4f\n", k, "static", s.overlap_f, s.boundary_f, s.object_accuracy);
    std::printf("%-6zu %-8s %9.4f %9.4f %9.4f\n", k, "riseg", g.overlap_f, g.boundary_f, g.object_accuracy);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive segmentation of cluttered planar scenes by pushing"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
    sub->add_option("--noise-sigma", overrides.noise_sigma, "Flow noise standard deviation in pixels");
    sub->add_option("--max-pushes", overrides.max_pushes, "Push budget per episode");
  };

  auto* gen = app.add_subcommand("generate", "Write a suite of random scenes");
  int count = 20;
  std::string objects = "4..6";
  std::uint64_t seed = 0;
  std::string out;
  gen->add_option("--count", count, "Number of scenes")->check(CLI::PositiveNumber);
  gen->add_option("--objects", objects, "Objects per scene, N or LO..HI");
  gen->add_option("--seed", seed, "Seed");
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--config", config_path, "RunConfig JSON file (generator section)")->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train-kde", "Fit the frame grouping model on simulated pushes");
  int episodes = 40;
  train->add_option("--episodes", episodes, "Training episodes")->check(CLI::PositiveNumber);
  train->add_option("--seed", seed, "Seed");
  train->add_option("--out", out, "Model file")->required();
  add_common(train);

  auto* run = app.add_subcommand("run", "Run episodes over a scene suite");
  std::string suite, model_path;
  run->add_option("--suite", suite, "Suite directory")->required()->check(CLI::ExistingDirectory);
  run->add_option("--model", model_path, "Model file (defaults to model_path in the config)");
  run->add_option("--out", out, "Run directory")->required();
  add_common(run);

  auto* eval = app.add_subcommand("eval", "Recompute metrics from the masks of a run directory");
  std::string run_dir;
  int tol = 1;
  eval->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--tol", tol, "Boundary tolerance in pixels")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto [lo, hi] = parse_range(objects);
      const riseg::RunConfig cfg = resolve(config_path, {});
      const auto files = riseg::generate_suite(count, lo, hi, seed, out, cfg.generator);
      std::printf("wrote %zu scenes to %s\n", files.size(), out.c_str());
    } else if (*train) {
      const riseg::RunConfig cfg = resolve(config_path, overrides);
      const riseg::GroupingModel model = riseg::train_command(episodes, seed, cfg);
      riseg::save_model(out, model);
      std::printf("model: %llu same / %llu different pairs, prior %.4f -> %s\n",
                  static_cast<unsigned long long>(model.same_pairs),
                  static_cast<unsigned long long>(model.diff_pairs), model.prior_same, out.c_str());
    } else if (*run) {
      riseg::RunConfig cfg = resolve(config_path, overrides);
      if (model_path.empty()) model_path = cfg.model_path;
      if (model_path.empty()) throw riseg::Error(riseg::ErrorCode::InvalidConfig, "no model given");
      if (!fs::exists(model_path)) throw riseg::Error(riseg::ErrorCode::Io, "model not found: " + model_path);
      cfg.model_path = model_path;
      const auto model = riseg::load_model(model_path);
      const auto report = riseg::run_suite(riseg::list_suite(suite), model, cfg, out);
      print_summary(report);
    } else if (*eval) {
      const std::string csv = riseg::recompute_metrics(run_dir, tol);
      const fs::path stored = fs::path(run_dir) / "metrics.csv";
      std::cout << csv;
      const fs::path resolved = fs::path(run_dir) / "config_resolved.json";
      const bool comparable = fs::exists(resolved) &&
                              riseg::load_config(resolved).boundary_tol_px == tol;
      if (comparable && fs::exists(stored)) {
        const bool same = riseg::io::read_text(stored) == csv;
        std::fprintf(stderr, "stored metrics.csv %s\n", same ? "matches" : "DIFFERS");
        if (!same) return 3;
      }
    }
  } catch (const riseg::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(riseg::to_string(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

#include "riseg/config.hpp"

#include <set>

#include "riseg/errors.hpp"
#include "riseg/io.hpp"

namespace riseg {
namespace {

using nlohmann::json;

// Reads the known members of one JSON object and rejects everything else.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw Error(ErrorCode::InvalidConfig, name_ + " must be an object");
  }

  template <typename T>
  Section& get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return *this;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, name_ + "." + key + ": " + e.what());
    }
    return *this;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw Error(ErrorCode::InvalidConfig, "unknown key " + name_ + "." + item.key());
      }
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

std::string mode_name(FeatureMode m) { return m == FeatureMode::Raw6 ? "raw6" : "norm_split"; }

FeatureMode mode_from_name(const std::string& s) {
  if (s == "norm_split") return FeatureMode::NormSplit;
  if (s == "raw6") return FeatureMode::Raw6;
  throw Error(ErrorCode::InvalidConfig, "unknown feature mode '" + s + "'");
}

std::string rule_name(ElbowRule r) {
  switch (r) {
    case ElbowRule::Curvature: return "curvature";
    case ElbowRule::MarginalGain: return "marginal_gain";
    case ElbowRule::LastSignificantGain: return "last_significant_gain";
  }
  return "?";
}

ElbowRule rule_from_name(const std::string& s) {
  if (s == "curvature") return ElbowRule::Curvature;
  if (s == "marginal_gain") return ElbowRule::MarginalGain;
  if (s == "last_significant_gain") return ElbowRule::LastSignificantGain;
  throw Error(ErrorCode::InvalidConfig, "unknown elbow rule '" + s + "'");
}

}  // namespace

std::string to_string(se3::TwistMethod method) {
  switch (method) {
    case se3::TwistMethod::MatrixLog: return "matrix_log";
    case se3::TwistMethod::FiniteDifference: return "finite_difference";
    case se3::TwistMethod::ForwardDifference: return "forward_difference";
  }
  return "matrix_log";
}

se3::TwistMethod twist_method_from_string(const std::string& name) {
  if (name == "matrix_log") return se3::TwistMethod::MatrixLog;
  if (name == "finite_difference") return se3::TwistMethod::FiniteDifference;
  if (name == "forward_difference") return se3::TwistMethod::ForwardDifference;
  throw Error(ErrorCode::InvalidConfig, "unknown twist method '" + name + "'");
}

void validate(const RunConfig& c) {
  const auto& p = c.planner;
  require(0 <= p.l_l && p.l_l < p.l_u && p.l_u <= 255, "planner thresholds need 0 <= l_l < l_u <= 255");
  require(p.d_a > 0 && p.d_b > 0 && p.d_push > 0, "planner distances must be positive");
  require(p.k_max >= 1, "planner.k_max must be >= 1");
  require(p.perp_tol_deg >= 0 && p.perp_tol_deg < 90, "planner.perp_tol_deg must be in [0, 90)");
  require(p.pixel_pitch > 0, "planner.pixel_pitch must be positive");
  require(p.min_split_gain >= 0 && p.min_split_gain < 1, "planner.min_split_gain must be in [0, 1)");
  require(p.split_gain > 0 && p.split_gain < 1, "planner.split_gain must be in (0, 1)");
  require(c.sampler.n_samples >= 9, "sampler.n_samples must be >= 9");
  require(c.sampler.d_c > 0 && c.sampler.move_eps >= 0 && c.sampler.area_eps > 0 && c.sampler.rigid_tol > 0, "invalid sampler settings");
  require(c.correction.grad_eps > 0, "correction.grad_eps must be positive");
  require(c.correction.min_region >= 1, "correction.min_region must be >= 1");
  require(c.correction.min_group_frames >= 1, "correction.min_group_frames must be >= 1");
  require(c.correction.seed_tol > 0, "correction.seed_tol must be positive");
  const auto& s = c.static_seg;
  require(s.p_merge >= 0 && s.p_merge <= 1, "static_seg.p_merge must be in [0, 1]");
  require(s.touch_eps >= 0 && s.core_margin >= 0 && s.band_px >= 0 && s.jitter >= 0, "invalid static_seg settings");
  for (int u : {s.u_core, s.u_ambig, s.u_edge}) require(u >= 0 && u <= 255, "static_seg levels must be in [0, 255]");
  require(c.push.max_rotation >= 0 && c.push.max_chain >= 0 && c.push.contact_eps >= 0, "invalid push settings");
  require(c.kde.min_bandwidth > 0 && c.kde.max_samples_per_class >= 1 && c.kde.min_pairs_per_class >= 1,
          "invalid kde settings");
  if (c.kde.bandwidth) {
    require(static_cast<int>(c.kde.bandwidth->size()) == feature_dim(c.kde.mode), "kde.bandwidth has wrong size");
    for (double b : *c.kde.bandwidth) require(b > 0, "kde.bandwidth entries must be positive");
  }
  const auto& t = c.training;
  require(2 <= t.min_objects && t.min_objects <= t.max_objects && t.max_objects <= 8, "invalid training object range");
  require(t.pushes_per_episode >= 1, "training.pushes_per_episode must be >= 1");
  require(c.noise_sigma >= 0, "noise_sigma must be non-negative");
  require(c.max_pushes >= 0, "max_pushes must be non-negative");
  require(c.tau > 0 && c.tau < 1, "tau must be in (0, 1)");
  require(c.boundary_tol_px >= 0, "boundary_tol_px must be non-negative");
}

nlohmann::json to_json(const RunConfig& c) {
  json j;
  const auto& p = c.planner;
  j["planner"] = {{"l_u", p.l_u},          {"l_l", p.l_l},
                  {"d_a", p.d_a},          {"d_b", p.d_b},
                  {"d_push", p.d_push},    {"k_max", p.k_max},
                  {"perp_tol_deg", p.perp_tol_deg}, {"pixel_pitch", p.pixel_pitch},
                  {"min_split_gain", p.min_split_gain}, {"elbow_rule", rule_name(p.elbow_rule)},
                  {"split_gain", p.split_gain}};
  j["sampler"] = {{"n_samples", c.sampler.n_samples},
                  {"d_c", c.sampler.d_c},
                  {"move_eps", c.sampler.move_eps},
                  {"area_eps", c.sampler.area_eps},
                  {"rigid_tol", c.sampler.rigid_tol}};
  j["correction"] = {{"grad_eps", c.correction.grad_eps},
                     {"min_region", c.correction.min_region},
                     {"min_group_frames", c.correction.min_group_frames},
                     {"seed_tol", c.correction.seed_tol}};
  const auto& s = c.static_seg;
  j["static_seg"] = {{"p_merge", s.p_merge},     {"touch_eps", s.touch_eps}, {"core_margin", s.core_margin},
                     {"band_px", s.band_px},     {"u_core", s.u_core},       {"u_ambig", s.u_ambig},
                     {"u_edge", s.u_edge},       {"jitter", s.jitter}};
  j["push"] = {{"rotation_gain", c.push.rotation_gain},
               {"max_rotation", c.push.max_rotation},
               {"max_chain", c.push.max_chain},
               {"contact_eps", c.push.contact_eps},
               {"clearance", c.push.clearance}};
  const auto& g = c.generator;
  j["generator"] = {{"min_vertices", g.min_vertices},
                    {"max_vertices", g.max_vertices},
                    {"min_diameter", g.min_diameter},
                    {"max_diameter", g.max_diameter},
                    {"touch_gap_min", g.touch_gap_min},
                    {"touch_gap_max", g.touch_gap_max},
                    {"separate_gap_min", g.separate_gap_min},
                    {"separate_gap_max", g.separate_gap_max},
                    {"border_margin", g.border_margin},
                    {"max_attempts", g.max_attempts}};
  j["kde"] = {{"mode", mode_name(c.kde.mode)},
              {"bandwidth", c.kde.bandwidth ? json(*c.kde.bandwidth) : json(nullptr)},
              {"min_bandwidth", c.kde.min_bandwidth},
              {"max_samples_per_class", c.kde.max_samples_per_class},
              {"min_pairs_per_class", c.kde.min_pairs_per_class}};
  j["training"] = {{"min_objects", c.training.min_objects},
                   {"max_objects", c.training.max_objects},
                   {"pushes_per_episode", c.training.pushes_per_episode}};
  j["noise_sigma"] = c.noise_sigma;
  j["max_pushes"] = c.max_pushes;
  j["master_seed"] = c.master_seed;
  j["tau"] = c.tau;
  j["twist_method"] = to_string(c.twist_method);
  j["boundary_tol_px"] = c.boundary_tol_px;
  j["skip_resolved_seams"] = c.skip_resolved_seams;
  j["model_path"] = c.model_path;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  Section top(j, "config");
  if (const json* sub = top.child("planner")) {
    auto& p = c.planner;
    Section s(*sub, "planner");
    s.get("l_u", p.l_u).get("l_l", p.l_l).get("d_a", p.d_a).get("d_b", p.d_b).get("d_push", p.d_push);
    s.get("k_max", p.k_max).get("perp_tol_deg", p.perp_tol_deg).get("pixel_pitch", p.pixel_pitch);
    std::string rule = rule_name(p.elbow_rule);
    s.get("min_split_gain", p.min_split_gain).get("elbow_rule", rule).get("split_gain", p.split_gain).finish();
    p.elbow_rule = rule_from_name(rule);
  }
  if (const json* sub = top.child("sampler")) {
    Section s(*sub, "sampler");
    s.get("n_samples", c.sampler.n_samples).get("d_c", c.sampler.d_c).get("move_eps", c.sampler.move_eps);
    s.get("area_eps", c.sampler.area_eps).get("rigid_tol", c.sampler.rigid_tol).finish();
  }
  if (const json* sub = top.child("correction")) {
    Section s(*sub, "correction");
    s.get("grad_eps", c.correction.grad_eps).get("min_region", c.correction.min_region);
    s.get("min_group_frames", c.correction.min_group_frames).get("seed_tol", c.correction.seed_tol).finish();
  }
  if (const json* sub = top.child("static_seg")) {
    auto& o = c.static_seg;
    Section s(*sub, "static_seg");
    s.get("p_merge", o.p_merge).get("touch_eps", o.touch_eps).get("core_margin", o.core_margin);
    s.get("band_px", o.band_px).get("u_core", o.u_core).get("u_ambig", o.u_ambig).get("u_edge", o.u_edge);
    s.get("jitter", o.jitter).finish();
  }
  if (const json* sub = top.child("push")) {
    auto& p = c.push;
    Section s(*sub, "push");
    s.get("rotation_gain", p.rotation_gain).get("max_rotation", p.max_rotation).get("max_chain", p.max_chain);
    s.get("contact_eps", p.contact_eps).get("clearance", p.clearance).finish();
  }
  if (const json* sub = top.child("generator")) {
    auto& g = c.generator;
    Section s(*sub, "generator");
    s.get("min_vertices", g.min_vertices).get("max_vertices", g.max_vertices);
    s.get("min_diameter", g.min_diameter).get("max_diameter", g.max_diameter);
    s.get("touch_gap_min", g.touch_gap_min).get("touch_gap_max", g.touch_gap_max);
    s.get("separate_gap_min", g.separate_gap_min).get("separate_gap_max", g.separate_gap_max);
    s.get("border_margin", g.border_margin).get("max_attempts", g.max_attempts).finish();
  }
  if (const json* sub = top.child("kde")) {
    Section s(*sub, "kde");
    std::string mode = mode_name(c.kde.mode);
    s.get("mode", mode);
    c.kde.mode = mode_from_name(mode);
    if (const json* bw = s.child("bandwidth"); bw && !bw->is_null()) {
      try {
        c.kde.bandwidth = bw->get<std::vector<double>>();
      } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("kde.bandwidth: ") + e.what());
      }
    }
    s.get("min_bandwidth", c.kde.min_bandwidth).get("max_samples_per_class", c.kde.max_samples_per_class);
    s.get("min_pairs_per_class", c.kde.min_pairs_per_class).finish();
  }
  if (const json* sub = top.child("training")) {
    Section s(*sub, "training");
    s.get("min_objects", c.training.min_objects).get("max_objects", c.training.max_objects);
    s.get("pushes_per_episode", c.training.pushes_per_episode).finish();
  }
  std::string method = to_string(c.twist_method);
  top.get("noise_sigma", c.noise_sigma).get("max_pushes", c.max_pushes).get("master_seed", c.master_seed);
  top.get("tau", c.tau).get("twist_method", method).get("boundary_tol_px", c.boundary_tol_px);
  top.get("skip_resolved_seams", c.skip_resolved_seams);
  top.get("model_path", c.model_path).finish();
  c.twist_method = twist_method_from_string(method);
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace riseg

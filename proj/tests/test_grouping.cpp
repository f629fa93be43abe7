#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "riseg/errors.hpp"
#include "riseg/frames.hpp"
#include "riseg/grouping.hpp"
#include "riseg/kde.hpp"
#include "riseg/oracles.hpp"
#include "riseg/scene.hpp"
#include "support.hpp"

namespace riseg {
namespace {

using testing::body;
using testing::scene_of;
using testing::square;

// Same-body features hug the origin; different-body features sit at
// d_linear >= 0.01.
GroupingModel toy_model(std::uint64_t seed = 1) {
  Rng rng(seed);
  std::vector<std::vector<double>> same, diff;
  for (int i = 0; i < 300; ++i) same.push_back({std::abs(uniform(rng, -1e-3, 1e-3)), std::abs(uniform(rng, -1e-4, 1e-4))});
  for (int i = 0; i < 300; ++i) diff.push_back({uniform(rng, 0.0, 0.3), uniform(rng, 0.01, 0.04)});
  return fit_grouping_model(same, diff, {}, 3);
}

TEST(SampleFrames, ZeroFlowKeepsPoses) {
  const SceneState s = scene_of({body(1, square(0.08), 0.0, 0.0)});
  const FlowField still(s.height, s.width);
  const auto fp = sample_frames(render_labels(s), still, s.geometry(), {}, 4);
  ASSERT_GE(fp.at_t.size(), 3u);
  ASSERT_EQ(fp.at_t.size(), fp.at_t1.size());
  for (std::size_t i = 0; i < fp.at_t.size(); ++i) {
    EXPECT_TRUE(fp.at_t[i].pose.matrix().isApprox(fp.at_t1[i].pose.matrix(), 1e-15));
    EXPECT_EQ(fp.at_t[i].object_hint, 1);
  }
}

TEST(SampleFrames, TooFewPixels) {
  LabelMask m(32, 32, 0);
  m(4, 4) = 1;
  m(4, 5) = 1;
  try {
    sample_frames(m, FlowField(32, 32), RasterGeometry{}, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientFrames);
  }
}

TEST(SampleFrames, RigidTranslationGivesOneDisplacement) {
  SceneState s = scene_of({body(1, square(0.08), 0.0, 0.0)});
  SceneState t = s;
  t.bodies[0].pose.x += 0.006;
  t.bodies[0].pose.y -= 0.004;
  const auto fp = sample_frames(render_labels(s), oracle_flow(s, t, 0.0, 0), s.geometry(), {}, 5);
  const se3::Pose expected = se3::Pose::from_translation({0.006, -0.004, 0.0});
  for (std::size_t i = 0; i < fp.at_t.size(); ++i) {
    const se3::Pose d = fp.at_t1[i].pose * fp.at_t[i].pose.inverse();
    EXPECT_TRUE(d.matrix().isApprox(expected.matrix(), 1e-9)) << i;
  }
}

TEST(SampleFrames, FramesRespectLimits) {
  const SceneState s = generate_scene(3, 5);
  const LabelMask m = render_labels(s);
  SamplerConfig cfg;
  const auto fp = sample_frames(m, FlowField(s.height, s.width), s.geometry(), cfg, 8);
  EXPECT_LE(fp.at_t.size(), static_cast<std::size_t>(cfg.n_samples / 3));
  for (const auto& f : fp.at_t) {
    std::set<std::pair<double, double>> seen;
    for (int k = 0; k < 3; ++k) {
      const auto& p = f.anchors[k];
      seen.insert({p.row, p.col});
      EXPECT_EQ(m(static_cast<int>(p.row), static_cast<int>(p.col)), f.object_hint);
      for (int l = k + 1; l < 3; ++l) {
        const auto& q = f.anchors[l];
        EXPECT_LE(std::hypot(p.row - q.row, p.col - q.col) * s.pixel_pitch, cfg.d_c + 1e-12);
      }
    }
    EXPECT_EQ(seen.size(), 3u);
    EXPECT_TRUE(f.pose.is_valid());
  }
}

TEST(ComputeBfifs, IdenticalFramesGiveZero) {
  const SceneState s = scene_of({body(1, square(0.08), 0.0, 0.0)});
  const auto fp = sample_frames(render_labels(s), FlowField(s.height, s.width), s.geometry(), {}, 4);
  for (const auto& xi : compute_bfifs(fp.at_t, fp.at_t))
    EXPECT_TRUE(xi.vector().isZero(0.0));
}

TEST(ComputeBfifs, TranslationTwist) {
  SceneState s = scene_of({body(1, square(0.08), 0.0, 0.0)});
  SceneState t = s;
  t.bodies[0].pose.x += 0.01;
  const auto fp = sample_frames(render_labels(s), oracle_flow(s, t, 0.0, 0), s.geometry(), {}, 5);
  Eigen::Matrix<double, 6, 1> want;
  want << 0, 0, 0, 0.01, 0, 0;
  for (const auto& xi : compute_bfifs(fp.at_t, fp.at_t1)) EXPECT_LE((xi.vector() - want).norm(), 1e-9);
}

TEST(ComputeBfifs, SeparatesTranslatedAndRotatedBodies) {
  SceneState s = scene_of({body(1, square(0.06), -0.06, 0.0), body(2, square(0.06), 0.06, 0.0)});
  SceneState t = s;
  t.bodies[0].pose.x += 0.01;
  t.bodies[1].pose.theta += 0.1;
  const auto fp = sample_frames(render_labels(s), oracle_flow(s, t, 0.0, 0), s.geometry(), {}, 6);
  const auto tw = compute_bfifs(fp.at_t, fp.at_t1);
  int a = 0, b = 0;
  for (std::size_t i = 0; i < tw.size(); ++i) {
    a += fp.at_t[i].object_hint == 1;
    b += fp.at_t[i].object_hint == 2;
    for (std::size_t j = 0; j < tw.size(); ++j) {
      const double d = (tw[i].vector() - tw[j].vector()).norm();
      if (fp.at_t[i].object_hint == fp.at_t[j].object_hint)
        EXPECT_LE(d, 1e-9);
      else
        EXPECT_GT(d, 1e-3);
    }
  }
  EXPECT_GT(a, 0);
  EXPECT_GT(b, 0);
}

TEST(PairFeature, Symmetric) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    se3::Twist x, y;
    x.angular = se3::Vec3::Random();
    x.linear = se3::Vec3::Random();
    y.angular = se3::Vec3::Random();
    y.linear = se3::Vec3::Random();
    for (auto mode : {FeatureMode::NormSplit, FeatureMode::Raw6}) {
      EXPECT_EQ(pair_feature(x, y, mode), pair_feature(y, x, mode));
      EXPECT_EQ(static_cast<int>(pair_feature(x, y, mode).size()), feature_dim(mode));
    }
  }
}

TEST(KernelDensity, IntegratesToOne) {
  const GroupingModel m = toy_model();
  for (const KernelDensity* k : {&m.same, &m.diff}) {
    double lo[2], hi[2];
    for (int d = 0; d < 2; ++d) {
      lo[d] = hi[d] = k->samples()[d];
      for (std::size_t i = 0; i < k->count(); ++i) {
        lo[d] = std::min(lo[d], k->samples()[i * 2 + d]);
        hi[d] = std::max(hi[d], k->samples()[i * 2 + d]);
      }
      lo[d] -= 6 * k->bandwidth()[d];
      hi[d] += 6 * k->bandwidth()[d];
    }
    const int n = 400;
    const double sx = (hi[0] - lo[0]) / n, sy = (hi[1] - lo[1]) / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double y[2] = {lo[0] + (i + 0.5) * sx, lo[1] + (j + 0.5) * sy};
        total += k->density(y) * sx * sy;
      }
    EXPECT_NEAR(total, 1.0, 0.01);
  }
}

TEST(Posterior, SeparatedClasses) {
  const GroupingModel m = toy_model();
  const double origin[2] = {0.0, 0.0};
  EXPECT_GT(posterior_same(m, origin), 0.99);
  double prev = 1.0;
  for (int i = 0; i <= 200; ++i) {
    const double y[2] = {0.0, i * 2.5e-4};
    const double p = posterior_same(m, y);
    EXPECT_LE(p, prev + 1e-12) << i;
    prev = p;
  }
}

TEST(Posterior, SymmetricEvidenceAndUnderflow) {
  GroupingModel m;
  m.same = KernelDensity(2, {0.0, 0.0}, {1.0, 1.0});
  m.diff = m.same;
  m.prior_same = 0.5;
  const double y[2] = {0.3, 0.2};
  EXPECT_DOUBLE_EQ(posterior_same(m, y), 0.5);
  m.prior_same = 0.3;
  const double far[2] = {1e3, 1e3};
  EXPECT_DOUBLE_EQ(posterior_same(m, far), 0.3);
}

TEST(Posterior, Bounded) {
  const GroupingModel m = toy_model();
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double y[2] = {uniform(rng, 0, 1), uniform(rng, 0, 0.1)};
    const double p = posterior_same(m, y);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(FitModel, PriorIsClassFrequency) {
  std::vector<std::vector<double>> same(60, {0.0, 0.0}), diff(140, {0.1, 0.02});
  const auto m = fit_grouping_model(same, diff, {}, 1);
  EXPECT_EQ(m.prior_same, 60.0 / 200.0);
  EXPECT_EQ(m.same_pairs, 60u);
  EXPECT_EQ(m.diff_pairs, 140u);
}

TEST(FitModel, OrderFree) {
  Rng rng(6);
  std::vector<std::vector<double>> same, diff;
  for (int i = 0; i < 3000; ++i) same.push_back({uniform(rng, 0, 0.01), uniform(rng, 0, 0.001)});
  for (int i = 0; i < 500; ++i) diff.push_back({uniform(rng, 0, 0.3), uniform(rng, 0, 0.03)});
  const auto a = fit_grouping_model(same, diff, {}, 9);
  std::reverse(same.begin(), same.end());
  std::shuffle(diff.begin(), diff.end(), rng);
  const auto b = fit_grouping_model(same, diff, {}, 9);
  EXPECT_EQ(a, b);
}

TEST(FitModel, ClassStarvation) {
  std::vector<std::vector<double>> same(49, {0.0, 0.0}), diff(100, {0.1, 0.02});
  try {
    fit_grouping_model(same, diff, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClassStarvation);
  }
}

TEST(FitModel, SaveLoadRoundTrip) {
  GroupingModel m = toy_model();
  m.metadata = R"({"episodes": 3})";
  const auto path = std::filesystem::temp_directory_path() / "riseg_model_roundtrip.riskde";
  save_model(path, m);
  EXPECT_EQ(load_model(path), m);
  std::filesystem::remove(path);
}

// Frames with hand-set anchor motion; the pose is irrelevant to grouping.
std::vector<BodyFrame> frames_shifted(const std::vector<double>& shift) {
  std::vector<BodyFrame> out;
  for (std::size_t i = 0; i < shift.size(); ++i) {
    BodyFrame f;
    const double r = 10.0 * i;
    f.anchors = {PixelCoord{r, 0}, PixelCoord{r, 3}, PixelCoord{r + 3, 0}};
    for (auto& a : f.anchors) a.col += shift[i];
    out.push_back(f);
  }
  return out;
}

se3::Twist translation(double vx) {
  se3::Twist t;
  t.linear = {vx, 0, 0};
  return t;
}

TEST(GroupBfifs, IdenticalMotionIsOneGroup) {
  const auto m = toy_model();
  const std::vector<se3::Twist> tw(6, translation(0.01));
  const auto g = group_bfifs(tw, frames_shifted(std::vector<double>(6, 0)), frames_shifted(std::vector<double>(6, 5)), m,
                             0.5, 1.0);
  ASSERT_EQ(g.groups.size(), 1u);
  EXPECT_EQ(g.groups[0].size(), 6u);
  EXPECT_EQ(g.moving.size(), 6u);
}

TEST(GroupBfifs, TwoClusters) {
  const auto m = toy_model();
  std::vector<se3::Twist> tw;
  for (int i = 0; i < 8; ++i) tw.push_back(translation(i % 2 ? 0.01 : 0.03));
  const auto g = group_bfifs(tw, frames_shifted(std::vector<double>(8, 0)), frames_shifted(std::vector<double>(8, 5)), m,
                             0.5, 1.0);
  ASSERT_EQ(g.groups.size(), 2u);
  EXPECT_EQ(g.groups[0], (std::vector<std::size_t>{0, 2, 4, 6}));
  EXPECT_EQ(g.groups[1], (std::vector<std::size_t>{1, 3, 5, 7}));
}

TEST(GroupBfifs, StationaryFramesAreLeftOut) {
  const auto m = toy_model();
  const std::vector<se3::Twist> tw(5, translation(0.0));
  const auto still = frames_shifted(std::vector<double>(5, 0));
  const auto g = group_bfifs(tw, still, still, m, 0.5, 1.0);
  EXPECT_TRUE(g.groups.empty());
  EXPECT_TRUE(g.moving.empty());

  const auto mixed = frames_shifted({0, 5, 0, 5, 0.2});
  std::vector<se3::Twist> tw2(5, translation(0.01));
  const auto h = group_bfifs(tw2, still, mixed, m, 0.5, 1.0);
  EXPECT_EQ(h.moving, (std::vector<std::size_t>{1, 3}));
  for (const auto& grp : h.groups)
    for (auto i : grp) EXPECT_TRUE(i == 1 || i == 3);
}

TEST(GroupBfifs, PermutationInvariant) {
  const auto m = toy_model();
  Rng rng(12);
  const int n = 30;
  std::vector<se3::Twist> tw;
  std::vector<double> shift;
  for (int i = 0; i < n; ++i) {
    tw.push_back(translation(0.01 * (1 + static_cast<int>(uniform_index(rng, 3)))));
    shift.push_back(uniform_index(rng, 4) == 0 ? 0.0 : 4.0);
  }
  const auto base = group_bfifs(tw, frames_shifted(std::vector<double>(n, 0)), frames_shifted(shift), m, 0.5, 1.0);

  std::vector<std::size_t> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<se3::Twist> tw_p(n);
  std::vector<double> shift_p(n);
  for (int i = 0; i < n; ++i) tw_p[i] = tw[perm[i]], shift_p[i] = shift[perm[i]];
  const auto got = group_bfifs(tw_p, frames_shifted(std::vector<double>(n, 0)), frames_shifted(shift_p), m, 0.5, 1.0);

  auto canonical = [](const FrameGrouping& g, const std::vector<std::size_t>* map) {
    std::set<std::set<std::size_t>> out;
    for (const auto& grp : g.groups) {
      std::set<std::size_t> s;
      for (auto i : grp) s.insert(map ? (*map)[i] : i);
      out.insert(s);
    }
    return out;
  };
  EXPECT_EQ(canonical(got, &perm), canonical(base, nullptr));
}

}  // namespace
}  // namespace riseg

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "riseg/errors.hpp"
#include "riseg/io.hpp"
#include "riseg/oracles.hpp"
#include "riseg/scene.hpp"
#include "support.hpp"

namespace riseg {
namespace {

using testing::body;
using testing::scene_of;
using testing::square;

// World coordinate of the centre of pixel index i on the default raster.
double centre(int i) { return -0.256 + (i + 0.5) * 0.002; }

TEST(GenerateScene, MinimalClutterTouches) {
  const SceneState s = generate_scene(0, 2);
  ASSERT_EQ(s.bodies.size(), 2u);
  EXPECT_FALSE(touching_pairs(s, 0.002).empty());
}

TEST(GenerateScene, Deterministic) {
  const SceneState a = generate_scene(42, 5), b = generate_scene(42, 5);
  EXPECT_EQ(a, b);
  EXPECT_EQ(io::scene_to_json(a).dump(), io::scene_to_json(b).dump());
}

TEST(GenerateScene, BodiesAreValid) {
  GeneratorConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SceneState s = generate_scene(seed, 6, cfg);
    std::set<int> ids;
    const auto world_pairs = touching_pairs(s, 0.002);
    EXPECT_GE(static_cast<int>(world_pairs.size()), 3) << seed;
    for (std::size_t i = 0; i < s.bodies.size(); ++i) {
      const auto& b = s.bodies[i];
      EXPECT_TRUE(ids.insert(b.id).second);
      EXPECT_GE(b.polygon.size(), 3u);
      EXPECT_GT(geom::signed_area(b.polygon), 0.0);
      EXPECT_TRUE(geom::is_simple(b.polygon));
      const double d = geom::diameter(b.polygon);
      EXPECT_GE(d, cfg.min_diameter - 1e-12);
      EXPECT_LE(d, cfg.max_diameter + 1e-12);
      for (const auto& v : b.world_polygon()) {
        EXPECT_GT(v.x(), s.workspace.x_min);
        EXPECT_LT(v.x(), s.workspace.x_max);
        EXPECT_GT(v.y(), s.workspace.y_min);
        EXPECT_LT(v.y(), s.workspace.y_max);
      }
      for (std::size_t j = i + 1; j < s.bodies.size(); ++j)
        EXPECT_FALSE(geom::intersects(b.world_polygon(), s.bodies[j].world_polygon()));
    }
  }
}

TEST(GenerateScene, SweepRarelyFails) {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    try {
      generate_scene(seed, 5);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::PlacementFailure);
      ++failures;
    }
  }
  EXPECT_LT(failures, 5);
}

TEST(ApplyPush, AlignedContactTranslatesOnly) {
  const SceneState s = scene_of({body(1, square(0.04), centre(128), centre(128))});
  const PushAction a{{128, 117}, {0.0, 1.0}, 0.02};
  const SceneState t = apply_push(s, a);
  EXPECT_DOUBLE_EQ(t.bodies[0].pose.theta, 0.0);
  EXPECT_NEAR(t.bodies[0].pose.x - s.bodies[0].pose.x, 0.02, 1e-15);
  EXPECT_NEAR(t.bodies[0].pose.y - s.bodies[0].pose.y, 0.0, 1e-15);
}

TEST(ApplyPush, OffsetContactRotates) {
  const SceneState s = scene_of({body(1, square(0.04), centre(128), centre(128))});
  const PushAction a{{120, 117}, {0.0, 1.0}, 0.02};
  const SceneState t = apply_push(s, a);
  EXPECT_NE(t.bodies[0].pose.theta, 0.0);
  EXPECT_NEAR(t.bodies[0].pose.x - s.bodies[0].pose.x, 0.02, 1e-15);
}

TEST(ApplyPush, ChainDisplacesNeighbourLess) {
  const SceneState s = scene_of({body(1, square(0.04), centre(100), centre(128)),
                                 body(2, square(0.04), centre(100) + 0.041, centre(128)),
                                 body(3, square(0.03), -0.15, -0.15, 0.3)});
  const auto out = simulate_push(s, {{128, 89}, {0.0, 1.0}, 0.02});
  ASSERT_EQ(out.moved, (std::vector<int>{1, 2}));
  const auto shift = [&](int i) {
    return std::hypot(out.scene.bodies[i].pose.x - s.bodies[i].pose.x, out.scene.bodies[i].pose.y - s.bodies[i].pose.y);
  };
  EXPECT_GT(shift(1), 0.0);
  EXPECT_LE(shift(1), shift(0));
  EXPECT_EQ(out.scene.bodies[2], s.bodies[2]);
  EXPECT_FALSE(geom::intersects(out.scene.bodies[0].world_polygon(), out.scene.bodies[1].world_polygon()));
}

TEST(ApplyPush, NoContact) {
  const SceneState s = scene_of({body(1, square(0.04), 0.0, 0.0)});
  try {
    apply_push(s, {{10, 10}, {0.0, 1.0}, 0.02});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoContact);
  }
}

TEST(ApplyPush, UntouchedBodiesKeepPosesExactly) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const SceneState s = generate_scene(seed, 5);
    const LabelMask gt = render_labels(s);
    PixelIndex contact{};
    for (int r = 0; r < gt.rows() && contact.row == 0; ++r)
      for (int c = 0; c < gt.cols(); ++c)
        if (gt(r, c) == s.bodies[0].id) {
          contact = {r, c};
          break;
        }
    const auto out = simulate_push(s, {contact, {1.0, 0.0}, 0.02});
    const std::set<int> moved(out.moved.begin(), out.moved.end());
    for (std::size_t i = 0; i < s.bodies.size(); ++i)
      if (!moved.count(s.bodies[i].id)) EXPECT_EQ(out.scene.bodies[i].pose, s.bodies[i].pose);
  }
}

TEST(RenderLabels, EmptyScene) {
  const LabelMask m = render_labels(SceneState{});
  for (auto v : m.data()) EXPECT_EQ(v, 0);
}

TEST(RenderLabels, SquareCountMatchesBruteForce) {
  const SceneState s = scene_of({body(1, square(0.031), 0.0123, -0.0311, 0.4)});
  const LabelMask m = render_labels(s);
  const auto poly = s.bodies[0].world_polygon();
  long expected = 0, got = 0;
  for (int r = 0; r < s.height; ++r)
    for (int c = 0; c < s.width; ++c) {
      expected += geom::contains(poly, s.pixel_to_world({double(r), double(c)}));
      got += m(r, c) == 1;
    }
  EXPECT_GT(got, 0);
  EXPECT_EQ(got, expected);
}

TEST(RenderLabels, TouchingBodiesPartition) {
  const SceneState s = scene_of({body(1, square(0.04), 0.0, 0.0), body(2, square(0.04), 0.04, 0.0)});
  const LabelMask m = render_labels(s);
  long ones = 0, twos = 0;
  for (auto v : m.data()) ones += v == 1, twos += v == 2;
  EXPECT_EQ(ones + twos, 400 + 400);
}

TEST(StaticSeg, SeparatedBodiesMatchTruth) {
  const SceneState s = scene_of({body(1, square(0.04), -0.05, 0.0), body(2, square(0.04), 0.05, 0.0)});
  const auto obs = oracle_static_seg(s, {}, 3);
  EXPECT_EQ(obs.labels, render_labels(s));
  for (auto v : obs.uncertainty.data()) EXPECT_FALSE(v >= 120 && v < 150);
}

TEST(StaticSeg, TouchingPairMergesWithUncertainSeam) {
  const SceneState s = testing::touching_squares();
  StaticSegConfig cfg;
  cfg.p_merge = 1.0;
  const auto obs = oracle_static_seg(s, cfg, 3);
  EXPECT_EQ(positive_labels(obs.labels).size(), 1u);
  const LabelMask gt = render_labels(s);
  // Pixels straddling the seam: a body pixel with the other body within band_px.
  int seam = 0;
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 1; c + 1 < gt.cols(); ++c) {
      if (gt(r, c) == 0) continue;
      const bool straddles = (gt(r, c) == 1 && (gt(r, c + 1) == 2 || (c + 2 < gt.cols() && gt(r, c + 2) == 2))) ||
                             (gt(r, c) == 2 && (gt(r, c - 1) == 1 || (c >= 2 && gt(r, c - 2) == 1)));
      if (!straddles) continue;
      ++seam;
      EXPECT_GE(obs.uncertainty(r, c), 120);
      EXPECT_LT(obs.uncertainty(r, c), 150);
    }
  EXPECT_GT(seam, 20);
}

TEST(StaticSeg, ZeroMergeProbabilityIsIdentity) {
  StaticSegConfig cfg;
  cfg.p_merge = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SceneState s = generate_scene(seed, 5);
    EXPECT_EQ(oracle_static_seg(s, cfg, seed).labels, render_labels(s));
  }
}

TEST(StaticSeg, NeverOverSegments) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneState s = generate_scene(seed, 6);
    const LabelMask gt = render_labels(s);
    const auto obs = oracle_static_seg(s, {}, seed);
    std::map<Label, std::set<Label>> image;
    for (std::size_t i = 0; i < gt.size(); ++i)
      if (gt.data()[i] != 0) image[gt.data()[i]].insert(obs.labels.data()[i]);
    for (const auto& [g, preds] : image) {
      EXPECT_EQ(preds.size(), 1u) << "seed " << seed << " body " << g;
      EXPECT_FALSE(preds.count(0));
    }
  }
}

TEST(StaticSeg, Deterministic) {
  const SceneState s = generate_scene(5, 5);
  const auto a = oracle_static_seg(s, {}, 9), b = oracle_static_seg(s, {}, 9);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.uncertainty, b.uncertainty);
}

TEST(OracleFlow, StillSceneHasZeroFlow) {
  const SceneState s = generate_scene(1, 4);
  const FlowField f = oracle_flow(s, s, 0.0, 0);
  for (auto v : f.du.data()) EXPECT_EQ(v, 0.0);
  for (auto v : f.dv.data()) EXPECT_EQ(v, 0.0);
}

TEST(OracleFlow, TranslationInPixels) {
  SceneState s = scene_of({body(1, square(0.04), 0.0, 0.0), body(2, square(0.03), 0.1, 0.1)});
  SceneState t = s;
  t.bodies[0].pose.x += 0.01;
  const FlowField f = oracle_flow(s, t, 0.0, 0);
  const LabelMask gt = render_labels(s);
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c) {
      const bool moving = gt(r, c) == 1;
      EXPECT_NEAR(f.du(r, c), moving ? 5.0 : 0.0, 1e-9);
      EXPECT_NEAR(f.dv(r, c), 0.0, 1e-9);
    }
}

TEST(OracleFlow, RotationMagnitudeGrowsWithRadius) {
  SceneState s = scene_of({body(1, square(0.06), centre(128), centre(128))});
  SceneState t = s;
  t.bodies[0].pose.theta = 0.05;
  const FlowField f = oracle_flow(s, t, 0.0, 0);
  const double k = 2 * std::sin(0.025);
  const LabelMask gt = render_labels(s);
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c) {
      if (gt(r, c) != 1) continue;
      const double radius = std::hypot(r - 128.0, c - 128.0);
      EXPECT_NEAR(std::hypot(f.du(r, c), f.dv(r, c)), k * radius, 1e-9);
    }
}

TEST(OracleFlow, MismatchedScenes) {
  const SceneState s = scene_of({body(1, square(0.04), 0.0, 0.0)});
  const SceneState t = scene_of({body(2, square(0.04), 0.0, 0.0)});
  try {
    oracle_flow(s, t, 0.0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedScenes);
  }
}

TEST(OracleFlow, TransportsLabelsOfPushedBodies) {
  long hits = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneState s = generate_scene(seed, 5);
    const LabelMask gt = render_labels(s);
    PixelIndex contact{};
    bool found = false;
    for (int r = 0; r < gt.rows() && !found; ++r)
      for (int c = 0; c < gt.cols() && !found; ++c)
        if (gt(r, c) == s.bodies[1].id) contact = {r, c}, found = true;
    const auto out = simulate_push(s, {contact, {0.6, 0.8}, 0.02});
    const LabelMask next = render_labels(out.scene);
    const FlowField f = oracle_flow(s, out.scene, 0.0, 0);
    const std::set<int> moved(out.moved.begin(), out.moved.end());
    for (int r = 0; r < gt.rows(); ++r)
      for (int c = 0; c < gt.cols(); ++c) {
        if (!moved.count(gt(r, c))) continue;
        const int tr = static_cast<int>(std::lround(r + f.dv(r, c)));
        const int tc = static_cast<int>(std::lround(c + f.du(r, c)));
        ++total;
        hits += next.contains(tr, tc) && next(tr, tc) == gt(r, c);
      }
  }
  ASSERT_GT(total, 0);
  EXPECT_GE(static_cast<double>(hits) / total, 0.98);
}

class IoRoundTrip : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("riseg_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(IoRoundTrip, SceneIsBitExact) {
  const SceneState s = generate_scene(17, 6);
  io::write_scene(dir_ / "s.json", s);
  EXPECT_EQ(io::read_scene(dir_ / "s.json"), s);
}

TEST_F(IoRoundTrip, Rasters) {
  const SceneState s = generate_scene(18, 5);
  const auto obs = oracle_static_seg(s, {}, 1);
  io::write_pgm(dir_ / "l.pgm", obs.labels);
  io::write_pgm(dir_ / "u.pgm", obs.uncertainty);
  EXPECT_EQ(io::read_label_pgm(dir_ / "l.pgm"), obs.labels);
  EXPECT_EQ(io::read_uncertainty_pgm(dir_ / "u.pgm"), obs.uncertainty);

  SceneState t = s;
  t.bodies[0].pose.x += 0.003;
  const FlowField f = oracle_flow(s, t, 0.3, 5);
  io::write_flow(dir_ / "f.risflow", f);
  const FlowField g = io::read_flow(dir_ / "f.risflow");
  ASSERT_EQ(g.rows(), f.rows());
  for (std::size_t i = 0; i < f.du.size(); ++i) {
    EXPECT_EQ(g.du.data()[i], static_cast<float>(f.du.data()[i]));
    EXPECT_EQ(g.dv.data()[i], static_cast<float>(f.dv.data()[i]));
  }
  EXPECT_EQ(io::read_text(dir_ / "f.risflow").substr(0, 8), "RISFLOW1");
}

TEST_F(IoRoundTrip, MalformedScene) {
  io::write_text(dir_ / "bad.json", R"({"bodies": [{"id": 1}]})");
  EXPECT_THROW(io::read_scene(dir_ / "bad.json"), Error);
}

}  // namespace
}  // namespace riseg

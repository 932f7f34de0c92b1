#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "voebench/dataset.hpp"
#include "voebench/error.hpp"
#include "voebench/forge.hpp"
#include "voebench/movie.hpp"
#include "voebench/verify.hpp"

using namespace voebench;

namespace {

constexpr int kTarget = 0;

const WorldLine& source(const WorldPair& p, const FrameRef& r) { return r.source == Source::A ? p.a : p.b; }

const ObjectState* state_of(const WorldPair& p, const FrameRef& r, int id) {
  const WorldLine& w = source(p, r);
  const int i = w.object_index(id);
  return i < 0 ? nullptr : &w.frames[r.frame][i];
}

RenderConfig small() {
  RenderConfig c;
  c.width = c.height = 48;
  return c;
}

class AllScenarios : public ::testing::TestWithParam<BlockId> {};

}  // namespace

TEST(Scenarios, EighteenPerBlockInOrder) {
  EXPECT_EQ(all_blocks().size(), 3u);
  for (const auto& b : all_blocks()) {
    const auto s = enumerate_scenarios(b.id);
    ASSERT_EQ(s.size(), 18u);
    EXPECT_EQ(s.front().visibility, Visibility::visible);
    EXPECT_EQ(s.front().motion, Motion::stationary);
    EXPECT_EQ(s.front().n_objects, 1);
    EXPECT_EQ(s.back().visibility, Visibility::occluded);
    EXPECT_EQ(s.back().motion, Motion::dynamic_2);
    EXPECT_EQ(s.back().n_objects, 3);
    std::set<std::string> names;
    for (const auto& x : s) names.insert(x.name());
    EXPECT_EQ(names.size(), 18u);
  }
}

TEST(SpliceFrames, SwitchAtWindowMidpoint) {
  const auto f = splice_frames("AB", {{40, 60}}, 100);
  ASSERT_EQ(f.size(), 100u);
  for (int t = 0; t < 100; ++t) {
    EXPECT_EQ(f[t].frame, t);
    EXPECT_EQ(f[t].source, t < 50 ? Source::A : Source::B) << t;
  }
  const auto g = splice_frames("BAB", {{30, 40}, {60, 70}}, 100);
  EXPECT_EQ(g[34].source, Source::B);
  EXPECT_EQ(g[35].source, Source::A);
  EXPECT_EQ(g[64].source, Source::A);
  EXPECT_EQ(g[65].source, Source::B);
  EXPECT_THROW(splice_frames("AB", {{30, 40}, {60, 70}}, 100), Error);
}

TEST(WorldPair, O1OccludedStaticTargetOnlyInB) {
  const ScenarioSpec sc{BlockId::O1, Visibility::occluded, Motion::stationary, 1};
  const WorldPair p = build_world_pair(sc, 11);
  EXPECT_EQ(p.a.object_index(kTarget), -1);
  EXPECT_GE(p.b.object_index(kTarget), 0);
  ASSERT_EQ(p.windows.size(), 1u);
  const RenderedPair r = render_pair(p, small());
  for (int t = p.windows[0].start_frame; t <= p.windows[0].end_frame; ++t) {
    EXPECT_EQ(occlusion_state(p.b, t, kTarget), OcclusionState::fully_occluded);
    EXPECT_EQ(r.a[t].rgb_hash, r.b[t].rgb_hash) << t;
  }
}

TEST(WorldPair, O2DiffersOnlyInShape) {
  const ScenarioSpec sc{BlockId::O2, Visibility::visible, Motion::dynamic_1, 2};
  const WorldPair p = build_world_pair(sc, 5);
  const auto* ta = p.a.find_object(kTarget);
  const auto* tb = p.b.find_object(kTarget);
  ASSERT_TRUE(ta && tb);
  EXPECT_NE(ta->shape, tb->shape);
  EXPECT_EQ(ta->size, tb->size);
  for (int t = 0; t < p.a.n_frames; ++t)
    for (std::size_t i = 0; i < p.a.objects.size(); ++i)
      EXPECT_EQ(p.a.frames[t][i].position, p.b.frames[t][p.b.object_index(p.a.objects[i].object_id)].position);
}

TEST(WorldPair, O3DisplacementAtLeastThreeDmax) {
  for (auto motion : {Motion::stationary, Motion::dynamic_1, Motion::dynamic_2}) {
    const ScenarioSpec sc{BlockId::O3, Visibility::occluded, motion, 1};
    const WorldPair p = build_world_pair(sc, 21);
    double worst = 0;
    for (int t = 0; t < p.a.n_frames; ++t) {
      const Vec3 d = p.a.frames[t][p.a.object_index(kTarget)].position - p.b.frames[t][p.b.object_index(kTarget)].position;
      worst = std::max(worst, d.norm());
    }
    EXPECT_GE(worst, 3 * 0.15 - 1e-9);
  }
}

TEST(WorldPair, NoValidSpliceWhenWindowsCannotBeLongEnough) {
  ForgeConfig cfg;
  cfg.w_min = 90;
  cfg.max_attempts = 5;
  try {
    build_world_pair({BlockId::O1, Visibility::occluded, Motion::dynamic_1, 1}, 1, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoValidSplice);
  }
}

TEST(Compose, RejectsBadWindows) {
  const ScenarioSpec sc{BlockId::O1, Visibility::occluded, Motion::dynamic_1, 1};
  auto p = std::make_shared<WorldPair>(build_world_pair(sc, 2));
  EXPECT_THROW(compose_quadruplet(p, {}, sc, "x", 1), Error);
  EXPECT_THROW(compose_quadruplet(p, {p->windows[0], p->windows[0]}, sc, "x", 1), Error);
  // A window where the target is in view.
  try {
    compose_quadruplet(p, {{0, 5}}, sc, "x", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowViolation);
  }
}

TEST(Compose, DynamicTwoImpossibleReturnsToStartCount) {
  const ScenarioSpec sc{BlockId::O1, Visibility::occluded, Motion::dynamic_2, 1};
  const Quadruplet q = forge_set(BlockId::O1, Split::dev, 15, 0, 9, {});
  ASSERT_EQ(q.movies[0].scenario, sc);
  for (const auto& m : q.movies) {
    if (m.label != Label::impossible) continue;
    auto count = [&](int t) { return state_of(*q.parents, m.frames[t], kTarget) ? 1 : 0; };
    const int mid = (q.parents->windows[0].end_frame + q.parents->windows[1].start_frame) / 2;
    EXPECT_EQ(count(0), count(99));
    EXPECT_NE(count(0), count(mid));
  }
}

TEST_P(AllScenarios, QuadrupletStructureAndViolationLocality) {
  const BlockId block = GetParam();
  const auto scenarios = enumerate_scenarios(block);
  for (int si = 0; si < 18; ++si) {
    const Quadruplet q = forge_set(block, Split::dev, si, 0, 3, {});
    SCOPED_TRACE(q.set_id);
    const WorldPair& p = *q.parents;
    int n_pos = 0;
    std::multiset<std::pair<int, int>> pos_refs, imp_refs;
    for (const auto& m : q.movies) {
      EXPECT_EQ(m.movie_id.rfind(q.set_id, 0), 0u);
      ASSERT_EQ(m.frames.size(), 100u);
      for (int t = 0; t < 100; ++t) EXPECT_EQ(m.frames[t].frame, t);
      auto& refs = m.label == Label::possible ? pos_refs : imp_refs;
      for (const auto& r : m.frames) refs.insert({static_cast<int>(r.source), r.frame});

      // Distractors are continuous and unchanged in every movie.
      for (const auto& o : p.a.objects) {
        if (o.object_id == kTarget) continue;
        for (int t = 1; t < 100; ++t) {
          const auto* s0 = state_of(p, m.frames[t - 1], o.object_id);
          const auto* s1 = state_of(p, m.frames[t], o.object_id);
          ASSERT_TRUE(s0 && s1);
          EXPECT_LE((s1->position - s0->position).norm(), p.a.d_max + 1e-9);
        }
        EXPECT_EQ(p.b.find_object(o.object_id)->shape, o.shape);
      }

      if (m.label == Label::possible) {
        ++n_pos;
        const Source s = m.frames[0].source;
        EXPECT_TRUE(std::all_of(m.frames.begin(), m.frames.end(), [&](const FrameRef& r) { return r.source == s; }));
        EXPECT_EQ(check_world_line(s == Source::A ? p.a : p.b), std::nullopt);
        continue;
      }
      // The impossible movie breaks its block's principle at a switch.
      const int sw = p.windows[0].switch_frame();
      const auto* before = state_of(p, m.frames[sw - 1], kTarget);
      const auto* after = state_of(p, m.frames[sw], kTarget);
      const WorldLine& wb = source(p, m.frames[sw - 1]);
      const WorldLine& wa = source(p, m.frames[sw]);
      switch (block) {
        case BlockId::O1:
          EXPECT_NE(before == nullptr, after == nullptr);
          break;
        case BlockId::O2:
          ASSERT_TRUE(before && after);
          EXPECT_NE(wb.find_object(kTarget)->shape, wa.find_object(kTarget)->shape);
          EXPECT_LE((after->position - before->position).norm(), p.a.d_max + 1e-9);
          break;
        case BlockId::O3:
          ASSERT_TRUE(before && after);
          EXPECT_EQ(wb.find_object(kTarget)->shape, wa.find_object(kTarget)->shape);
          EXPECT_GT((after->position - before->position).norm(), p.a.d_max);
          break;
      }
    }
    EXPECT_EQ(n_pos, 2);
    EXPECT_EQ(pos_refs, imp_refs);
    EXPECT_EQ(p.windows.size(), scenarios[si].motion == Motion::dynamic_2 ? 2u : 1u);
  }
}

INSTANTIATE_TEST_SUITE_P(Blocks, AllScenarios, ::testing::Values(BlockId::O1, BlockId::O2, BlockId::O3),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Compose, HashMultisetAndSpliceIdentityOverSeeds) {
  // Rendered frame hashes: possible and impossible movies show the same frames, and
  // occluded splice windows are identical in all four movies.
  ForgeConfig fc;
  for (std::uint64_t seed = 0; seed < 6; ++seed)
    for (int si : {0, 5, 9, 13, 17}) {
      const BlockId block = static_cast<BlockId>(seed % 3);
      const Quadruplet q = forge_set(block, Split::test, si, 0, seed, fc);
      const RenderedPair r = render_pair(*q.parents, small());
      EXPECT_EQ(check_pixel_matching(fingerprint(q, r), q.movies[0].scenario, q.parents->windows), std::nullopt)
          << q.set_id;
    }
}

TEST(Compose, MovieOrderIsSeededAndDeterministic) {
  const Quadruplet a = forge_set(BlockId::O2, Split::dev, 4, 1, 77, {});
  const Quadruplet b = forge_set(BlockId::O2, Split::dev, 4, 1, 77, {});
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(a.movies[k].movie_id, b.movies[k].movie_id);
    EXPECT_EQ(a.movies[k].pattern, b.movies[k].pattern);
    EXPECT_EQ(a.movies[k].frames, b.movies[k].frames);
  }
  std::set<std::string> first_patterns;
  for (int inst = 0; inst < 12; ++inst) first_patterns.insert(forge_set(BlockId::O2, Split::dev, 4, inst, 77, {}).movies[0].pattern);
  EXPECT_GT(first_patterns.size(), 1u);
}

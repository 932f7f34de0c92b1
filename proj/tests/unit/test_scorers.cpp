#include <cmath>

#include <gtest/gtest.h>

#include "voebench/dataset.hpp"
#include "voebench/error.hpp"
#include "voebench/eval.hpp"
#include "voebench/movie.hpp"
#include "voebench/pipeline.hpp"
#include "voebench/scorers.hpp"

using namespace voebench;

namespace {

constexpr int kRes = 96;

RenderConfig rc() {
  RenderConfig c;
  c.width = c.height = kRes;
  return c;
}

ForgeConfig fc() { return {}; }

MovieFrames flat_movie(int n, std::uint8_t value) {
  MovieFrames m;
  m.movie_id = "flat";
  m.intrinsics = {16, 16, 16, 16, 8, 8};
  for (int t = 0; t < n; ++t) {
    m.rgb.push_back(Plane<std::uint8_t>::Constant(16, 48, value));
    m.depth.push_back(Plane<std::uint16_t>::Constant(16, 16, 20000));
    m.mask.push_back(Plane<std::uint8_t>::Zero(16, 16));
  }
  return m;
}

struct Rendered {
  Quadruplet q;
  std::array<MovieFrames, 4> movies;
};

Rendered render(BlockId b, int scenario, int instance, std::uint64_t seed = 31) {
  Rendered r{forge_set(b, Split::dev, scenario, instance, seed, fc()), {}};
  r.movies = render_quadruplet(r.q, rc());
  return r;
}

double min_score(const std::vector<FramePlausibility>& f) { return aggregate_video_score(f); }

}  // namespace

TEST(Aggregate, MinimumOfFrames) {
  EXPECT_EQ(aggregate_video_score({{1, 0.9}, {2, 0.2}, {3, 0.8}}), 0.2);
  EXPECT_EQ(aggregate_video_score({{1, 0.7}, {2, 0.7}}), 0.7);
  try {
    aggregate_video_score({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(Schedule, TargetsDropTripletsPastTheEnd) {
  const auto s = PredictionSchedule::of(Span::short_span).targets(100);
  ASSERT_EQ(s.size(), 93u);
  EXPECT_EQ(s.front(), 7);
  EXPECT_EQ(s.back(), 99);
  const auto l = PredictionSchedule::of(Span::long_span).targets(100);
  ASSERT_EQ(l.size(), 60u);
  EXPECT_EQ(l.front(), 40);
  EXPECT_EQ(l.back(), 99);
  EXPECT_TRUE(PredictionSchedule::of(Span::long_span).targets(40).empty());
}

TEST(Names, ParseAndPrint) {
  for (auto k : {ScorerKind::frame_diff, ScorerKind::tracking, ScorerKind::mask_extrapolation})
    EXPECT_EQ(parse_scorer(to_string(k)), k);
  EXPECT_EQ(parse_span("long"), Span::long_span);
  EXPECT_THROW(parse_scorer("cnn"), Error);
  EXPECT_THROW(parse_span("medium"), Error);
}

TEST(FrameDiff, ClosedForm) {
  const MovieFrames still = flat_movie(20, 40);
  for (const auto& f : frame_diff_scorer(still, PredictionSchedule::of(Span::short_span))) EXPECT_EQ(f.score, 1.0);

  // Alternating 0/51 every 5 frames: every target differs from f_i2 by 51 = 0.2 * 255.
  MovieFrames m = flat_movie(20, 0);
  for (int t = 0; t < 20; ++t) m.rgb[t].setConstant((t / 5) % 2 ? 51 : 0);
  const auto f = frame_diff_scorer(m, PredictionSchedule::of(Span::short_span));
  ASSERT_EQ(f.size(), 13u);
  for (const auto& x : f) EXPECT_NEAR(x.score, std::exp(-10 * 0.2), 1e-12);
  ScorerConfig c;
  c.lambda = 5;
  EXPECT_NEAR(frame_diff_scorer(m, PredictionSchedule::of(Span::short_span), c)[0].score, std::exp(-1.0), 1e-12);
}

TEST(Scorers, RejectMoviesTooShortOrInconsistent) {
  EXPECT_THROW(run_scorer(ScorerKind::tracking, flat_movie(30, 1), PredictionSchedule::of(Span::long_span)), Error);
  MovieFrames m = flat_movie(20, 1);
  m.mask.pop_back();
  EXPECT_THROW(run_scorer(ScorerKind::mask_extrapolation, m, PredictionSchedule::of(Span::short_span)), Error);
}

TEST(Scorers, EmptySceneIsPerfectlyPlausible) {
  for (auto k : {ScorerKind::frame_diff, ScorerKind::tracking, ScorerKind::mask_extrapolation})
    EXPECT_EQ(score_movie(k, flat_movie(50, 9), PredictionSchedule::of(Span::short_span)), 1.0);
}

TEST(Blobs, ShapeClassOfRenderedObjects) {
  for (Shape shape : {Shape::cube, Shape::sphere, Shape::cone}) {
    SceneRecipe r;
    r.n_frames = 1;
    TrajectorySpec t;
    t.initial_position = Vec3(0, 5, 0.35);
    r.objects.push_back({ObjectSpec{0, shape, 0.7, 1, 0.5}, t});
    const WorldLine w = simulate(r);
    const FrameBundle b = render_frame(w, 0, rc(), 1);
    MovieFrames m;
    m.intrinsics = Intrinsics::from_camera(w.camera, kRes, kRes);
    m.rgb = {b.rgb};
    m.depth = {b.depth};
    m.mask = {b.mask};
    const auto blobs = find_blobs(m, 0);
    ASSERT_EQ(blobs.size(), 1u);
    EXPECT_FALSE(blobs[0].occluder);
    EXPECT_EQ(classify_shape(blobs[0], 30), static_cast<ShapeClass>(static_cast<int>(shape) == 0   ? 1
                                                                      : static_cast<int>(shape) == 1 ? 0
                                                                                                     : 2))
        << to_string(shape);
    EXPECT_NEAR(blobs[0].centroid.z(), (t.initial_position - w.camera.position).norm(), 0.6);
  }
}

TEST(Scorers, DeterministicAndInRange) {
  const Rendered r = render(BlockId::O3, 13, 0);
  for (auto k : {ScorerKind::frame_diff, ScorerKind::tracking, ScorerKind::mask_extrapolation})
    for (auto span : {Span::short_span, Span::long_span}) {
      const auto a = run_scorer(k, r.movies[0], PredictionSchedule::of(span));
      const auto b = run_scorer(k, r.movies[0], PredictionSchedule::of(span));
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].target, b[i].target);
        EXPECT_EQ(a[i].score, b[i].score);
        EXPECT_GE(a[i].score, 0.0);
        EXPECT_LE(a[i].score, 1.0);
      }
    }
}

// Static visible O1 scenes are the pop-in/out cell. In dynamic scenes the extrapolated
// motion of the target itself costs about as much as a pop, so no ordering is claimed.
TEST(FrameDiff, VisiblePopIsTheLowestFrame) {
  const auto sched = PredictionSchedule::of(Span::short_span);
  int checked = 0;
  for (int si = 0; si < 3; ++si)
    for (int inst = 0; inst < 3; ++inst) {
      const Rendered r = render(BlockId::O1, si, inst);
      for (int k = 0; k < 4; ++k) {
        if (r.q.movies[k].label != Label::impossible) continue;
        double violation = 1, other = 1;
        for (const auto& f : frame_diff_scorer(r.movies[k], sched)) {
          bool spans = false;
          for (const auto& w : r.q.parents->windows)
            spans |= f.target - sched.gap < w.switch_frame() && w.switch_frame() <= f.target;
          (spans ? violation : other) = std::min(spans ? violation : other, f.score);
        }
        EXPECT_LT(violation, other) << r.q.movies[k].movie_id;
        ++checked;
      }
    }
  EXPECT_EQ(checked, 18);
}

TEST(FrameDiff, BlindBehindOccluders) {
  const auto sched = PredictionSchedule::of(Span::short_span);
  for (int si = 9; si < 18; ++si) {
    const Rendered r = render(BlockId::O1, si, 0);
    std::vector<double> pos, imp;
    for (int k = 0; k < 4; ++k)
      (r.q.movies[k].label == Label::possible ? pos : imp).push_back(min_score(frame_diff_scorer(r.movies[k], sched)));
    for (double i : imp) {
      const double gap = std::min(std::abs(i - pos[0]) / pos[0], std::abs(i - pos[1]) / pos[1]);
      EXPECT_LE(gap, 0.05) << r.q.set_id;
    }
  }
}

TEST(Tracking, StaticOccludedPossibleMoviesStayClean) {
  const auto sched = PredictionSchedule::of(Span::short_span);
  for (BlockId b : {BlockId::O1, BlockId::O2, BlockId::O3})
    for (int si = 9; si < 12; ++si)
      for (int inst = 0; inst < 2; ++inst) {
        const Rendered r = render(b, si, inst);
        for (int k = 0; k < 4; ++k) {
          if (r.q.movies[k].label != Label::possible) continue;
          for (const auto& f : tracking_scorer(r.movies[k], sched))
            EXPECT_GE(f.score, 0.9) << r.q.movies[k].movie_id << " frame " << f.target;
        }
      }
}

TEST(Tracking, CatchesOccludedObjectPermanenceViolations) {
  const auto sched = PredictionSchedule::of(Span::short_span);
  int caught = 0, total = 0;
  for (int si = 9; si < 18; ++si)
    for (int inst = 0; inst < 2; ++inst) {
      const Rendered r = render(BlockId::O1, si, inst);
      double pos_min = 1;
      std::vector<double> imp;
      for (int k = 0; k < 4; ++k) {
        const double s = min_score(tracking_scorer(r.movies[k], sched));
        if (r.q.movies[k].label == Label::possible) pos_min = std::min(pos_min, s);
        else imp.push_back(s);
      }
      for (double s : imp) {
        caught += s < pos_min;
        ++total;
      }
    }
  EXPECT_GE(caught, 0.7 * total) << caught << "/" << total;
}

TEST(Tracking, ShapeSwapFiresNearTheSwitch) {
  for (int si = 0; si < 9; ++si) {
    const Rendered r = render(BlockId::O2, si, 0);
    const int sw = r.q.parents->windows[0].switch_frame();
    for (int k = 0; k < 4; ++k) {
      if (r.q.movies[k].label != Label::impossible) continue;
      bool near = false;
      for (const auto& e : track_events(r.movies[k]))
        near |= e.kind == TrackEventKind::shape_change && std::abs(e.frame - sw) <= 2;
      EXPECT_TRUE(near) << r.q.movies[k].movie_id << " switch " << sw;
    }
  }
}

TEST(MaskExtrapolation, StaticPossibleDeficitSmall) {
  const auto sched = PredictionSchedule::of(Span::short_span);
  const double floor = std::exp(-5 * 0.05);
  for (BlockId b : {BlockId::O1, BlockId::O2, BlockId::O3})
    for (int si : {0, 1, 2, 9, 10, 11}) {
      const Rendered r = render(b, si, 1);
      for (int k = 0; k < 4; ++k) {
        if (r.q.movies[k].label != Label::possible) continue;
        for (const auto& f : mask_extrapolation_scorer(r.movies[k], sched))
          EXPECT_GT(f.score, floor) << r.q.movies[k].movie_id << " frame " << f.target;
      }
    }
}

TEST(MaskExtrapolation, SeparatesVisibleObjectPermanence) {
  const auto sched = PredictionSchedule::of(Span::short_span);
  int wins = 0, pairs = 0;
  for (int si = 0; si < 9; ++si)
    for (int inst = 0; inst < 2; ++inst) {
      const Rendered r = render(BlockId::O1, si, inst);
      std::vector<double> pos, imp;
      for (int k = 0; k < 4; ++k)
        (r.q.movies[k].label == Label::possible ? pos : imp)
            .push_back(min_score(mask_extrapolation_scorer(r.movies[k], sched)));
      for (double p : pos)
        for (double i : imp) {
          wins += p > i;
          ++pairs;
        }
    }
  EXPECT_GE(wins, 0.9 * pairs) << wins << "/" << pairs;
}

TEST(Pipeline, ScorerConfigJson) {
  const ScorerConfig c = scorer_config_from_json(R"({"lambda": 3.5, "hidden_grace": 4})");
  EXPECT_EQ(c.lambda, 3.5);
  EXPECT_EQ(c.hidden_grace, 4);
  EXPECT_EQ(c.mu, ScorerConfig{}.mu);
  const ScorerConfig back = scorer_config_from_json(scorer_config_to_json(c));
  EXPECT_EQ(back.lambda, 3.5);
  for (const char* bad : {R"({"lamda": 1})", R"({"mu": -1})", R"({"hidden_grace": 2.5})", "[1]", "{"}) {
    try {
      scorer_config_from_json(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigError) << bad;
    }
  }
}

TEST(Pipeline, InMemoryScoresMatchPerMovie) {
  const Quadruplet q = forge_set(BlockId::O2, Split::dev, 12, 0, 4, fc());
  const std::vector<ScorerSpec> specs = {{ScorerKind::frame_diff, PredictionSchedule::of(Span::short_span), {}},
                                         {ScorerKind::tracking, PredictionSchedule::of(Span::long_span), {}}};
  const auto subs = score_quadruplets({q}, rc(), specs, 1);
  const auto movies = render_quadruplet(q, rc());
  ASSERT_EQ(subs.size(), 2u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(subs[0].at(q.movies[k].movie_id), score_movie(specs[0].kind, movies[k], specs[0].schedule));
    EXPECT_EQ(subs[1].at(q.movies[k].movie_id), score_movie(specs[1].kind, movies[k], specs[1].schedule));
  }
}

TEST(Scorers, VisibleNeverHarderThanOccluded) {
  const auto sets = forge_block(BlockId::O1, Split::test, 2, 8, fc(), 0);
  const std::vector<ScorerSpec> specs = {{ScorerKind::frame_diff, PredictionSchedule::of(Span::short_span), {}},
                                         {ScorerKind::tracking, PredictionSchedule::of(Span::short_span), {}},
                                         {ScorerKind::mask_extrapolation, PredictionSchedule::of(Span::short_span), {}},
                                         {ScorerKind::mask_extrapolation, PredictionSchedule::of(Span::long_span), {}}};
  const auto subs = score_quadruplets(sets, rc(), specs, 0);
  const auto recs = set_records(sets);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& t = build_report(subs[i], recs, Split::test).blocks.at(0).tables;
    if (specs[i].kind == ScorerKind::tracking) {
      // Near zero on both sides. Crossing objects whose masks merge can tie a visible set.
      EXPECT_LE(t[static_cast<int>(Visibility::visible)].relative[3][3], 0.1);
      EXPECT_LE(t[static_cast<int>(Visibility::occluded)].relative[3][3], 0.1);
      continue;
    }
    EXPECT_LE(t[static_cast<int>(Visibility::visible)].relative[3][3],
              t[static_cast<int>(Visibility::occluded)].relative[3][3])
        << to_string(specs[i].kind) << "/" << to_string(specs[i].schedule.gap == 5 ? Span::short_span : Span::long_span);
  }
}

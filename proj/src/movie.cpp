#include "voebench/movie.hpp"

#include "voebench/rng.hpp"

namespace voebench {

std::uint64_t mask_shuffle_seed(const Quadruplet& q, int k, int t) {
  return derive_key(q.seed, {tag("mask"), static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t)});
}

RenderedPair render_pair(const WorldPair& pair, const RenderConfig& cfg) {
  RenderedPair out;
  for (auto [w, dst] : {std::pair{&pair.a, &out.a}, std::pair{&pair.b, &out.b}}) {
    dst->reserve(w->n_frames);
    for (int t = 0; t < w->n_frames; ++t) {
      SharedFrame f{render_frame(*w, t, cfg, 0), 0};
      f.rgb_hash = frame_hash(f.bundle);
      dst->push_back(std::move(f));
    }
  }
  return out;
}

FrameBundle movie_frame(const Quadruplet& q, const RenderedPair& frames, int k, int t) {
  FrameBundle b = frames.at(q.movies[k].frames[t]).bundle;
  shuffle_labels(b, mask_shuffle_seed(q, k, t));
  return b;
}

std::array<MovieFrames, 4> render_quadruplet(const Quadruplet& q, const RenderConfig& cfg) {
  const RenderedPair frames = render_pair(*q.parents, cfg);
  const Intrinsics K = Intrinsics::from_camera(q.parents->a.camera, cfg.width, cfg.height);
  std::array<MovieFrames, 4> out;
  for (int k = 0; k < 4; ++k) {
    MovieFrames& m = out[k];
    m.movie_id = q.movies[k].movie_id;
    m.intrinsics = K;
    m.far_clip = cfg.far_clip;
    const int n = static_cast<int>(q.movies[k].frames.size());
    for (int t = 0; t < n; ++t) {
      FrameBundle b = movie_frame(q, frames, k, t);
      m.rgb.push_back(std::move(b.rgb));
      m.depth.push_back(std::move(b.depth));
      m.mask.push_back(std::move(b.mask));
    }
  }
  return out;
}

}  // namespace voebench

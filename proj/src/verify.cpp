#include "voebench/verify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "voebench/error.hpp"
#include "voebench/parallel.hpp"
#include "voebench/png_io.hpp"
#include "voebench/rng.hpp"

namespace voebench {

using nlohmann::json;

std::optional<std::string> check_pixel_matching(const SetFingerprint& s, const ScenarioSpec& scenario,
                                                const std::vector<SpliceWindow>& windows) {
  std::vector<std::uint64_t> pos, imp;
  int n_pos = 0;
  for (int k = 0; k < 4; ++k) {
    auto& dst = s.labels[k] == Label::possible ? pos : imp;
    dst.insert(dst.end(), s.frames[k].begin(), s.frames[k].end());
    n_pos += s.labels[k] == Label::possible;
  }
  if (n_pos != 2) return "expected 2 possible and 2 impossible movies, found " + std::to_string(n_pos) + " possible";
  std::sort(pos.begin(), pos.end());
  std::sort(imp.begin(), imp.end());
  if (pos != imp) return "possible and impossible movies do not show the same multiset of frames";

  if (scenario.visibility != Visibility::occluded) return std::nullopt;
  for (const auto& w : windows)
    for (int t = w.start_frame; t <= w.end_frame; ++t)
      for (int k = 1; k < 4; ++k) {
        if (t >= static_cast<int>(s.frames[k].size()) || t >= static_cast<int>(s.frames[0].size()))
          return "splice window extends past the movie";
        if (s.frames[k][t] != s.frames[0][t])
          return "frame " + std::to_string(t) + " inside splice window [" + std::to_string(w.start_frame) + "," +
                 std::to_string(w.end_frame) + "] differs between movies";
      }
  return std::nullopt;
}

SetFingerprint fingerprint(const Quadruplet& q, const RenderedPair& frames) {
  SetFingerprint f;
  f.set_id = q.set_id;
  for (int k = 0; k < 4; ++k) {
    f.labels[k] = q.movies[k].label;
    for (const auto& r : q.movies[k].frames) f.frames[k].push_back(frames.at(r).rgb_hash);
  }
  return f;
}

namespace {

const std::set<std::string> kRedactedKeys = {"format_version", "movie_id", "n_frames", "width",
                                             "height",         "intrinsics", "depth_unit", "far_clip"};

bool is_frame_file(const std::string& name, int n_frames) {
  if (name.size() != 7 || name.substr(3) != ".png") return false;
  if (!std::all_of(name.begin(), name.begin() + 3, [](char c) { return c >= '0' && c <= '9'; })) return false;
  return std::stoi(name.substr(0, 3)) < n_frames;
}

// Every path in the split must be one the layout allows; anything else is a leak.
void check_layout(const fs::path& split_dir, const SplitManifest& m, std::vector<VerifyFailure>& split_level,
                  std::map<std::string, std::string>& per_set) {
  std::set<std::string> blocks, sets, movies;
  for (const auto& b : m.blocks) {
    blocks.insert(std::string(to_string(b.block)));
    for (const auto& s : b.sets) {
      sets.insert(s.set_id);
      for (const auto& mv : s.movies) movies.insert(mv.movie_id);
    }
  }
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(split_dir, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    const fs::path rel = fs::relative(it->path(), split_dir, ec);
    std::vector<std::string> parts;
    for (const auto& p : rel) parts.push_back(p.string());
    const bool dir = it->is_directory(ec);
    const std::size_t d = parts.size();
    bool allowed = false;
    if (d == 1) allowed = dir ? blocks.count(parts[0]) > 0 : parts[0] == "manifest.json";
    else if (d == 2) allowed = dir ? sets.count(parts[1]) > 0 : parts[1] == "answers.json" && m.split != Split::train;
    else if (d == 3) allowed = dir && movies.count(parts[2]) > 0;
    else if (d == 4) allowed = dir ? (parts[3] == "rgb" || parts[3] == "depth" || parts[3] == "mask")
                                   : parts[3] == "status.json";
    else if (d == 5) allowed = !dir && is_frame_file(parts[4], m.n_frames);
    if (allowed) continue;
    const std::string why = "unexpected " + std::string(dir ? "directory " : "file ") + rel.generic_string() +
                            (parts.back() == "answers.json" ? " (labels leaked outside the block answers file)" : "");
    if (d >= 2 && sets.count(parts[1])) {
      per_set.emplace(parts[1], "redaction: " + why);
    } else {
      split_level.push_back({"", "redaction: " + why});
    }
    if (dir) it.disable_recursion_pending();
  }
  if (ec) split_level.push_back({"", "cannot walk " + split_dir.string() + ": " + ec.message()});
}

struct MovieScan {
  std::vector<std::uint64_t> pixels, bytes;
};

MovieScan scan_movie(const fs::path& dir, const SplitManifest& m, bool redacted) {
  const Bytes raw = read_file(dir / "status.json");
  json status;
  try {
    status = json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "status.json: " + std::string(e.what()));
  }
  if (redacted) {
    for (const auto& [k, v] : status.items())
      if (!kRedactedKeys.count(k)) throw Error(ErrorCode::VerifyFailure, "redaction: status.json exposes '" + k + "'");
  }
  if (status.value("n_frames", -1) != m.n_frames || status.value("width", -1) != m.width ||
      status.value("height", -1) != m.height)
    throw Error(ErrorCode::VerifyFailure, "status.json disagrees with the manifest on frame count or size");

  MovieScan s;
  for (int t = 0; t < m.n_frames; ++t) {
    const std::string f = frame_name(t);
    const Bytes rgb = read_file(dir / "rgb" / f);
    const auto img = decode_png_rgb(rgb);
    const auto depth = decode_png_gray16(read_file(dir / "depth" / f));
    const auto mask = decode_png_gray8(read_file(dir / "mask" / f));
    if (img.rows() != m.height || img.cols() != 3 * m.width || depth.rows() != m.height || depth.cols() != m.width ||
        mask.rows() != m.height || mask.cols() != m.width)
      throw Error(ErrorCode::VerifyFailure, "frame " + f + " has the wrong size");
    s.pixels.push_back(rgb_hash(img));
    s.bytes.push_back(tag(std::string_view(reinterpret_cast<const char*>(rgb.data()), rgb.size())));
  }
  return s;
}

std::optional<std::string> verify_set(const fs::path& split_dir, const SplitManifest& m, BlockId block,
                                      const SetEntry& e, const Answers* answers) {
  std::array<MovieScan, 4> scans;
  const bool quad = m.split != Split::train;
  if (quad && e.movies.size() != 4) return "expected 4 movies, manifest lists " + std::to_string(e.movies.size());
  for (std::size_t k = 0; k < e.movies.size(); ++k) {
    const auto& mv = e.movies[k];
    MovieScan s = scan_movie(movie_dir(split_dir, block, e.set_id, mv.movie_id), m, quad);
    if (movie_digest(s.pixels) != mv.digest) return "movie " + mv.movie_id + " does not match its manifest digest";
    if (quad) scans[k] = std::move(s);
  }
  if (!quad) return std::nullopt;

  if (!e.scenario || e.scenario_index < 0) return "manifest entry lacks its scenario";
  const auto ans = answers->find(e.set_id);
  if (ans == answers->end()) return "set missing from answers.json";

  // Regenerate the parents from the recorded seed to recover windows and check physics.
  const Quadruplet q = forge_set(block, m.split, e.scenario_index, e.instance, m.seed, m.forge_config());
  if (q.set_id != e.set_id) return "regenerated set id " + q.set_id + " does not match";
  for (const WorldLine* w : {&q.parents->a, &q.parents->b})
    if (auto bad = check_world_line(*w)) return "parent world line is not physically possible: " + *bad;

  SetFingerprint pixels, bytes;
  pixels.set_id = bytes.set_id = e.set_id;
  for (int k = 0; k < 4; ++k) {
    const auto& id = e.movies[k].movie_id;
    if (q.movies[k].movie_id != id) return "regenerated movie order differs at " + id;
    const auto lab = ans->second.find(id);
    if (lab == ans->second.end()) return "movie " + id + " missing from answers.json";
    if (lab->second != q.movies[k].label) return "label of " + id + " disagrees with the regenerated set";
    if (q.movies[k].label == Label::possible) {
      const Source src = q.movies[k].frames.front().source;
      for (const auto& r : q.movies[k].frames)
        if (r.source != src) return "possible movie " + id + " mixes both parents";
    }
    pixels.labels[k] = bytes.labels[k] = lab->second;
    pixels.frames[k] = scans[k].pixels;
    bytes.frames[k] = scans[k].bytes;
  }
  if (auto bad = check_pixel_matching(pixels, *e.scenario, q.parents->windows)) return *bad;
  if (auto bad = check_pixel_matching(bytes, *e.scenario, q.parents->windows)) return "rgb files: " + *bad;
  return std::nullopt;
}

}  // namespace

VerifyReport verify_split(const fs::path& split_dir, int jobs) {
  const SplitManifest m = read_manifest(split_dir);
  VerifyReport r;
  std::map<std::string, std::string> layout_issue;
  check_layout(split_dir, m, r.failures, layout_issue);

  std::map<BlockId, Answers> answers;
  if (m.split != Split::train) {
    for (const auto& b : m.blocks) {
      const fs::path p = split_dir / std::string(to_string(b.block)) / "answers.json";
      try {
        answers[b.block] = read_answers(p);
      } catch (const Error& e) {
        r.failures.push_back({"", "cannot read " + p.string() + ": " + e.what()});
        return r;
      }
    }
  }

  struct Job {
    BlockId block;
    const SetEntry* set;
  };
  std::vector<Job> work;
  for (const auto& b : m.blocks)
    for (const auto& s : b.sets) work.push_back({b.block, &s});
  std::vector<std::optional<std::string>> result(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const auto& [block, set] = work[i];
    if (auto it = layout_issue.find(set->set_id); it != layout_issue.end()) {
      result[i] = it->second;
      return;
    }
    try {
      const auto a = answers.find(block);
      result[i] = verify_set(split_dir, m, block, *set, a == answers.end() ? nullptr : &a->second);
    } catch (const Error& e) {
      result[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < work.size(); ++i)
    if (result[i]) r.failures.push_back({work[i].set->set_id, *result[i]});
  r.sets_checked = static_cast<int>(work.size());
  return r;
}

}  // namespace voebench

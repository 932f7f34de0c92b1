#include "voebench/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "voebench/error.hpp"
#include "voebench/parallel.hpp"
#include "voebench/png_io.hpp"
#include "voebench/rng.hpp"

namespace voebench {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json intrinsics_json(const Intrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}};
}

json base_status(const std::string& movie_id, int n_frames, const Intrinsics& k, double far_clip) {
  return {{"format_version", kFormatVersion},
          {"movie_id", movie_id},
          {"n_frames", n_frames},
          {"width", k.width},
          {"height", k.height},
          {"intrinsics", intrinsics_json(k)},
          {"depth_unit", "mm"},
          {"far_clip", far_clip}};
}

/// Ground truth exposed only with training movies.
json training_status(const WorldLine& w, const std::vector<FrameBundle>& frames, const std::string& movie_id,
                     const RenderConfig& cfg) {
  json s = base_status(movie_id, w.n_frames, Intrinsics::from_camera(w.camera, cfg.width, cfg.height), cfg.far_clip);
  s["label"] = "possible";
  s["camera"] = {{"position", vec_json(w.camera.position)},
                 {"look_at", vec_json(w.camera.look_at)},
                 {"vertical_fov", w.camera.vertical_fov}};
  json objs = json::array();
  for (const auto& o : w.objects)
    objs.push_back({{"object_id", o.object_id},
                    {"shape", to_string(o.shape)},
                    {"size", o.size},
                    {"texture_id", o.texture_id}});
  s["objects"] = objs;
  json occs = json::array();
  for (const auto& o : w.occluders) {
    json sched = json::array();
    for (const auto& k : o.schedule) sched.push_back({k.frame, k.elevation});
    occs.push_back({{"occluder_id", o.occluder_id},
                    {"base_position", vec_json(o.base_position)},
                    {"width", o.width},
                    {"height", o.height},
                    {"schedule", sched}});
  }
  s["occluders"] = occs;
  json fr = json::array();
  for (int t = 0; t < w.n_frames; ++t) {
    json states = json::array();
    for (std::size_t i = 0; i < w.objects.size(); ++i) {
      const auto& st = w.frames[t][i];
      states.push_back({{"object_id", st.object_id},
                        {"position", vec_json(st.position)},
                        {"yaw", st.yaw},
                        {"occlusion", to_string(occlusion_state(w, t, st.object_id))}});
    }
    json ids = json::object();
    const auto& truth = frames[t].hidden_truth;
    for (std::size_t l = 1; l < truth.size(); ++l)
      ids[std::to_string(l)] = {{"kind", truth[l].kind == EntityKind::object ? "object" : "occluder"},
                                {"id", truth[l].id}};
    fr.push_back({{"objects", states}, {"mask_ids", ids}});
  }
  s["frames"] = fr;
  return s;
}

void make_dirs(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + p.string() + ": " + ec.message());
}

struct EncodedFrame {
  Bytes rgb, depth;
  std::uint64_t rgb_hash = 0;
};

EncodedFrame encode_frame(const FrameBundle& b) {
  return {encode_png_rgb(b.rgb), encode_png_gray16(b.depth), rgb_hash(b.rgb)};
}

/// Writes frame files; returns the movie digest.
std::string write_frames(const fs::path& dir, int n_frames,
                         const std::function<const EncodedFrame&(int)>& encoded,
                         const std::function<Plane<std::uint8_t>(int)>& mask) {
  for (const char* sub : {"rgb", "depth", "mask"}) make_dirs(dir / sub);
  std::vector<std::uint64_t> hashes;
  for (int t = 0; t < n_frames; ++t) {
    const EncodedFrame& f = encoded(t);
    write_file(dir / "rgb" / frame_name(t), f.rgb);
    write_file(dir / "depth" / frame_name(t), f.depth);
    write_file(dir / "mask" / frame_name(t), encode_png_gray8(mask(t)));
    hashes.push_back(f.rgb_hash);
  }
  return movie_digest(hashes);
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(1) + "\n"); }

json parse_json_file(const fs::path& p) {
  const Bytes raw = read_file(p);
  try {
    return json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, p.string() + ": " + e.what());
  }
}

double parse_score_text(std::string_view s, const std::string& movie_id) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) {
    // from_chars does not know about "Infinity" spellings; treat them as non-finite too.
    std::string lower(s);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "nan" || lower == "inf" || lower == "-inf" || lower == "+inf" || lower == "infinity" ||
        lower == "-infinity" || lower == "+infinity")
      throw Error(ErrorCode::NonFiniteScore, "non-finite score for " + movie_id);
    throw Error(ErrorCode::ParseError, "score for " + movie_id + " is not a number: '" + std::string(s) + "'");
  }
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteScore, "non-finite score for " + movie_id);
  return v;
}

void check_complete(const Submission& sub, const std::vector<std::string>& expected_ids) {
  const std::set<std::string> expected(expected_ids.begin(), expected_ids.end());
  for (const auto& [id, score] : sub)
    if (!expected.count(id)) throw Error(ErrorCode::ParseError, "submission names unknown movie " + id);
  for (const auto& id : expected_ids)
    if (!sub.count(id)) throw Error(ErrorCode::MissingMovie, "submission lacks movie " + id);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  throw Error(ErrorCode::ParseError, "unknown split '" + std::string(s) + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string movie_digest(const std::vector<std::uint64_t>& rgb_hashes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto f : rgb_hashes) h = mix64(h ^ f);
  return hex64(h);
}

std::string frame_name(int t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d.png", t);
  return buf;
}

int SplitManifest::movie_count() const {
  int n = 0;
  for (const auto& b : blocks)
    for (const auto& s : b.sets) n += static_cast<int>(s.movies.size());
  return n;
}

RenderConfig SplitManifest::render_config() const {
  RenderConfig r;
  r.width = width;
  r.height = height;
  r.far_clip = far_clip;
  return r;
}

ForgeConfig SplitManifest::forge_config() const {
  ForgeConfig f;
  f.n_frames = n_frames;
  f.d_max = d_max;
  f.w_min = w_min;
  f.aspect = static_cast<double>(width) / height;
  return f;
}

std::string manifest_to_json(const SplitManifest& m) {
  json blocks = json::array();
  for (const auto& b : m.blocks) {
    json sets = json::array();
    for (const auto& s : b.sets) {
      json movies = json::array();
      for (const auto& mv : s.movies) movies.push_back({{"movie_id", mv.movie_id}, {"digest", mv.digest}});
      json js = {{"set_id", s.set_id}, {"instance", s.instance}, {"movies", movies}};
      if (s.scenario) {
        js["scenario"] = {{"visibility", to_string(s.scenario->visibility)},
                          {"motion", to_string(s.scenario->motion)},
                          {"n_objects", s.scenario->n_objects}};
        js["scenario_index"] = s.scenario_index;
      }
      sets.push_back(js);
    }
    blocks.push_back({{"block", to_string(b.block)}, {"sets", sets}});
  }
  json j = {{"format_version", m.format_version},
            {"split", to_string(m.split)},
            {"seed", m.seed},
            {"movies_per_scenario", m.movies_per_scenario},
            {"render", {{"width", m.width}, {"height", m.height}, {"far_clip", m.far_clip}}},
            {"simulation", {{"n_frames", m.n_frames}, {"d_max", m.d_max}, {"w_min", m.w_min}}},
            {"blocks", blocks}};
  return j.dump(1) + "\n";
}

SplitManifest manifest_from_json(std::string_view text) {
  SplitManifest m;
  try {
    const json j = json::parse(text);
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion)
      throw Error(ErrorCode::ParseError, "unsupported manifest version " + std::to_string(m.format_version));
    m.split = parse_split(j.at("split").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.movies_per_scenario = j.at("movies_per_scenario").get<int>();
    m.width = j.at("render").at("width").get<int>();
    m.height = j.at("render").at("height").get<int>();
    m.far_clip = j.at("render").at("far_clip").get<double>();
    m.n_frames = j.at("simulation").at("n_frames").get<int>();
    m.d_max = j.at("simulation").at("d_max").get<double>();
    m.w_min = j.at("simulation").at("w_min").get<int>();
    for (const auto& jb : j.at("blocks")) {
      BlockEntry b;
      b.block = parse_block(jb.at("block").get<std::string>());
      for (const auto& js : jb.at("sets")) {
        SetEntry s;
        s.set_id = js.at("set_id").get<std::string>();
        s.instance = js.at("instance").get<int>();
        if (js.contains("scenario")) {
          const auto& sc = js.at("scenario");
          s.scenario = ScenarioSpec{b.block, parse_visibility(sc.at("visibility").get<std::string>()),
                                    parse_motion(sc.at("motion").get<std::string>()), sc.at("n_objects").get<int>()};
          s.scenario_index = js.at("scenario_index").get<int>();
        }
        for (const auto& jm : js.at("movies"))
          s.movies.push_back({jm.at("movie_id").get<std::string>(), jm.at("digest").get<std::string>()});
        b.sets.push_back(std::move(s));
      }
      m.blocks.push_back(std::move(b));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("manifest: ") + e.what());
  }
  return m;
}

SplitManifest read_manifest(const fs::path& split_dir) {
  const Bytes raw = read_file(split_dir / "manifest.json");
  return manifest_from_json(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
}

std::string manifest_digest(const SplitManifest& m) { return hex64(tag(manifest_to_json(m))); }

std::uint64_t set_seed(std::uint64_t seed, Split split, BlockId block, int scenario_index, int instance) {
  return derive_key(seed, {tag("set"), tag(to_string(split)), tag(to_string(block)),
                           static_cast<std::uint64_t>(scenario_index), static_cast<std::uint64_t>(instance)});
}

std::string make_set_id(BlockId block, const ScenarioSpec& scenario, int instance) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", instance);
  return std::string(to_string(block)) + "_" + scenario.name() + "_" + buf;
}

Quadruplet forge_set(BlockId block, Split split, int scenario_index, int instance, std::uint64_t seed,
                     const ForgeConfig& cfg) {
  const auto scenarios = enumerate_scenarios(block);
  if (scenario_index < 0 || scenario_index >= static_cast<int>(scenarios.size()))
    throw Error(ErrorCode::ConfigError, "scenario index out of range");
  const ScenarioSpec& sc = scenarios[scenario_index];
  const std::uint64_t s = set_seed(seed, split, block, scenario_index, instance);
  auto pair = std::make_shared<WorldPair>(build_world_pair(sc, s, cfg));
  const auto windows = pair->windows;
  return compose_quadruplet(std::move(pair), windows, sc, make_set_id(block, sc, instance),
                            derive_key(s, {tag("order")}));
}

std::vector<Quadruplet> forge_block(BlockId block, Split split, int per_scenario, std::uint64_t seed,
                                    const ForgeConfig& cfg, int jobs) {
  const int n_sc = static_cast<int>(enumerate_scenarios(block).size());
  std::vector<Quadruplet> out(static_cast<std::size_t>(n_sc * per_scenario));
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    out[i] = forge_set(block, split, static_cast<int>(i) / per_scenario, static_cast<int>(i) % per_scenario, seed,
                       cfg);
  });
  return out;
}

std::string answers_to_json(const Answers& a) {
  json j = json::object();
  for (const auto& [set_id, movies] : a)
    for (const auto& [movie_id, label] : movies) j[set_id][movie_id] = to_string(label);
  return j.dump(1) + "\n";
}

Answers read_answers(const fs::path& path) {
  const json j = parse_json_file(path);
  Answers a;
  try {
    for (const auto& [set_id, movies] : j.items())
      for (const auto& [movie_id, label] : movies.items()) a[set_id][movie_id] = parse_label(label.get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return a;
}

Answers answers_for(const std::vector<Quadruplet>& sets) {
  Answers a;
  for (const auto& q : sets)
    for (const auto& m : q.movies) a[q.set_id][m.movie_id] = m.label;
  return a;
}

fs::path movie_dir(const fs::path& split_dir, BlockId block, const std::string& set_id, const std::string& movie_id) {
  return split_dir / std::string(to_string(block)) / set_id / movie_id;
}

std::vector<SplitManifest> write_dataset(const DatasetSpec& spec, const fs::path& out_dir) {
  if (spec.blocks.empty()) throw Error(ErrorCode::ConfigError, "no blocks requested");
  if (spec.splits.empty()) throw Error(ErrorCode::ConfigError, "no splits requested");
  if (spec.render.width <= 0 || spec.render.height <= 0)
    throw Error(ErrorCode::ConfigError, "render size must be positive");
  for (const auto& s : spec.splits) {
    if (s.movies_per_scenario <= 0)
      throw Error(ErrorCode::ConfigError, "movies per scenario must be positive for " + std::string(to_string(s.split)));
    if (s.split != Split::train && s.movies_per_scenario % 4 != 0)
      throw Error(ErrorCode::ConfigError, "dev/test movies per scenario must be a multiple of 4 (one quadruplet = 4)");
  }
  ForgeConfig forge = spec.forge;
  forge.aspect = static_cast<double>(spec.render.width) / spec.render.height;
  const RenderConfig& rc = spec.render;

  std::vector<SplitManifest> out;
  for (const auto& ss : spec.splits) {
    const fs::path split_dir = out_dir / std::string(to_string(ss.split));
    std::error_code ec;
    if (fs::exists(split_dir, ec)) {
      if (!fs::is_empty(split_dir, ec) && !fs::exists(split_dir / "manifest.json", ec))
        throw Error(ErrorCode::IoFailure, "refusing to overwrite non-dataset directory " + split_dir.string());
      fs::remove_all(split_dir, ec);
      if (ec) throw Error(ErrorCode::IoFailure, "cannot clear " + split_dir.string() + ": " + ec.message());
    }
    make_dirs(split_dir);

    SplitManifest m;
    m.split = ss.split;
    m.seed = spec.seed;
    m.movies_per_scenario = ss.movies_per_scenario;
    m.width = rc.width;
    m.height = rc.height;
    m.far_clip = rc.far_clip;
    m.n_frames = forge.n_frames;
    m.d_max = forge.d_max;
    m.w_min = forge.w_min;

    for (BlockId block : spec.blocks) {
      BlockEntry be{block, {}};
      const auto scenarios = enumerate_scenarios(block);
      const int n_sc = static_cast<int>(scenarios.size());
      if (ss.split == Split::train) {
        const int n = n_sc * ss.movies_per_scenario;
        be.sets.resize(n);
        parallel_for(static_cast<std::size_t>(n), spec.jobs, [&](std::size_t i) {
          const std::uint64_t s = set_seed(spec.seed, ss.split, block, -1, static_cast<int>(i));
          const WorldLine w = random_training_world(s, forge);
          char buf[24];
          std::snprintf(buf, sizeof buf, "%s_train_%05zu", std::string(to_string(block)).c_str(), i);
          SetEntry& e = be.sets[i];
          e.set_id = buf;
          e.instance = static_cast<int>(i);
          const std::string movie_id = e.set_id + "_1";
          std::vector<FrameBundle> frames;
          std::vector<EncodedFrame> enc;
          for (int t = 0; t < w.n_frames; ++t) {
            frames.push_back(render_frame(w, t, rc, derive_key(s, {tag("mask")})));
            enc.push_back(encode_frame(frames.back()));
          }
          const fs::path dir = movie_dir(split_dir, block, e.set_id, movie_id);
          const std::string digest = write_frames(
              dir, w.n_frames, [&](int t) -> const EncodedFrame& { return enc[t]; },
              [&](int t) { return frames[t].mask; });
          write_json(dir / "status.json", training_status(w, frames, movie_id, rc));
          e.movies.push_back({movie_id, digest});
        });
      } else {
        const int per = ss.movies_per_scenario / 4;
        be.sets.resize(static_cast<std::size_t>(n_sc * per));
        Answers answers;
        std::vector<std::map<std::string, Label>> labels(be.sets.size());
        parallel_for(be.sets.size(), spec.jobs, [&](std::size_t i) {
          const int sc = static_cast<int>(i) / per, inst = static_cast<int>(i) % per;
          const Quadruplet q = forge_set(block, ss.split, sc, inst, spec.seed, forge);
          const RenderedPair frames = render_pair(*q.parents, rc);
          std::vector<EncodedFrame> enc_a, enc_b;
          for (const auto& f : frames.a) enc_a.push_back(encode_frame(f.bundle));
          for (const auto& f : frames.b) enc_b.push_back(encode_frame(f.bundle));
          const Intrinsics K = Intrinsics::from_camera(q.parents->a.camera, rc.width, rc.height);

          SetEntry& e = be.sets[i];
          e.set_id = q.set_id;
          e.scenario = scenarios[sc];
          e.scenario_index = sc;
          e.instance = inst;
          for (int k = 0; k < 4; ++k) {
            const Movie& mv = q.movies[k];
            const fs::path dir = movie_dir(split_dir, block, q.set_id, mv.movie_id);
            const int n = static_cast<int>(mv.frames.size());
            const std::string digest = write_frames(
                dir, n,
                [&](int t) -> const EncodedFrame& {
                  const FrameRef& r = mv.frames[t];
                  return r.source == Source::A ? enc_a[r.frame] : enc_b[r.frame];
                },
                [&](int t) { return movie_frame(q, frames, k, t).mask; });
            write_json(dir / "status.json", base_status(mv.movie_id, n, K, rc.far_clip));
            e.movies.push_back({mv.movie_id, digest});
            labels[i][mv.movie_id] = mv.label;
          }
        });
        for (std::size_t i = 0; i < be.sets.size(); ++i) answers[be.sets[i].set_id] = labels[i];
        write_file(split_dir / std::string(to_string(block)) / "answers.json", answers_to_json(answers));
      }
      m.blocks.push_back(std::move(be));
    }
    write_file(split_dir / "manifest.json", manifest_to_json(m));
    out.push_back(std::move(m));
  }
  return out;
}

MovieFrames load_movie(const fs::path& dir) {
  const json status = parse_json_file(dir / "status.json");
  MovieFrames m;
  int n = 0;
  try {
    m.movie_id = status.at("movie_id").get<std::string>();
    n = status.at("n_frames").get<int>();
    m.intrinsics.width = status.at("width").get<int>();
    m.intrinsics.height = status.at("height").get<int>();
    const auto& k = status.at("intrinsics");
    m.intrinsics.fx = k.at("fx").get<double>();
    m.intrinsics.fy = k.at("fy").get<double>();
    m.intrinsics.cx = k.at("cx").get<double>();
    m.intrinsics.cy = k.at("cy").get<double>();
    m.far_clip = status.at("far_clip").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, (dir / "status.json").string() + ": " + e.what());
  }
  for (int t = 0; t < n; ++t) {
    const std::string f = frame_name(t);
    m.rgb.push_back(decode_png_rgb(read_file(dir / "rgb" / f)));
    m.depth.push_back(decode_png_gray16(read_file(dir / "depth" / f)));
    m.mask.push_back(decode_png_gray8(read_file(dir / "mask" / f)));
    const auto& d = m.depth.back();
    if (d.cols() != m.intrinsics.width || d.rows() != m.intrinsics.height || m.rgb.back().cols() != 3 * d.cols() ||
        m.rgb.back().rows() != d.rows() || m.mask.back().rows() != d.rows() || m.mask.back().cols() != d.cols())
      throw Error(ErrorCode::ParseError, "frame " + f + " of " + dir.string() + " has inconsistent size");
  }
  return m;
}

std::vector<std::string> movie_ids(const SplitManifest& m) {
  std::vector<std::string> ids;
  for (const auto& b : m.blocks)
    for (const auto& s : b.sets)
      for (const auto& mv : s.movies) ids.push_back(mv.movie_id);
  return ids;
}

Submission parse_submission_json(std::string_view text, const std::vector<std::string>& expected_ids) {
  std::set<std::string> seen;
  std::string duplicate;
  json::parser_callback_t cb = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      const auto key = parsed.get<std::string>();
      if (!seen.insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };
  json j;
  try {
    j = json::parse(text, cb);
  } catch (const json::exception& e) {
    // Bare NaN/Infinity tokens are not JSON, but they are what a careless writer emits.
    static const std::regex bare_nonfinite(R"(:\s*-?(NaN|nan|Infinity|inf)\b)");
    if (std::regex_search(std::string(text), bare_nonfinite))
      throw Error(ErrorCode::NonFiniteScore, "submission contains a non-finite score");
    throw Error(ErrorCode::ParseError, std::string("submission: ") + e.what());
  }
  if (!duplicate.empty()) throw Error(ErrorCode::DuplicateMovie, "movie " + duplicate + " scored twice");
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "submission must be a JSON object {movie_id: score}");
  Submission sub;
  for (const auto& [id, v] : j.items()) {
    if (v.is_number()) {
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw Error(ErrorCode::NonFiniteScore, "non-finite score for " + id);
      sub[id] = d;
    } else if (v.is_string()) {
      sub[id] = parse_score_text(v.get<std::string>(), id);
    } else {
      throw Error(ErrorCode::ParseError, "score for " + id + " is not a number");
    }
  }
  check_complete(sub, expected_ids);
  return sub;
}

Submission parse_submission_csv(std::string_view text, const std::vector<std::string>& expected_ids) {
  Submission sub;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string l = trim(line);
    if (l.empty()) continue;
    const auto comma = l.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::ParseError, "CSV line " + std::to_string(line_no) + " needs two columns");
    const std::string id = trim(std::string_view(l).substr(0, comma));
    const std::string score = trim(std::string_view(l).substr(comma + 1));
    if (line_no == 1 && id == "movie_id") continue;
    if (sub.count(id)) throw Error(ErrorCode::DuplicateMovie, "movie " + id + " scored twice");
    sub[id] = parse_score_text(score, id);
  }
  check_complete(sub, expected_ids);
  return sub;
}

Submission read_submission(const fs::path& path, const std::vector<std::string>& expected_ids) {
  const Bytes raw = read_file(path);
  const std::string_view text(reinterpret_cast<const char*>(raw.data()), raw.size());
  if (path.extension() == ".csv") return parse_submission_csv(text, expected_ids);
  return parse_submission_json(text, expected_ids);
}

std::string submission_to_json(const Submission& sub) {
  json j = json::object();
  for (const auto& [id, score] : sub) j[id] = score;
  return j.dump(1) + "\n";
}

void write_submission(const fs::path& path, const Submission& sub) {
  if (path.extension() == ".csv") {
    std::string out = "movie_id,score\n";
    char buf[64];
    for (const auto& [id, score] : sub) {
      std::snprintf(buf, sizeof buf, "%.17g", score);
      out += id + "," + buf + "\n";
    }
    write_file(path, out);
  } else {
    write_file(path, submission_to_json(sub));
  }
}

}  // namespace voebench

#include "voebench/pipeline.hpp"

#include <cmath>

#include <json.hpp>

#include "voebench/error.hpp"
#include "voebench/parallel.hpp"

namespace voebench {

using nlohmann::json;

ScorerConfig scorer_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("scorer config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "scorer config must be a JSON object");
  ScorerConfig c;
  auto real = [&](const std::string& k, const json& v) {
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, "scorer config: '" + k + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x <= 0) throw Error(ErrorCode::ConfigError, "scorer config: '" + k + "' must be positive");
    return x;
  };
  auto integer = [&](const std::string& k, const json& v) {
    if (!v.is_number_integer()) throw Error(ErrorCode::ConfigError, "scorer config: '" + k + "' must be an integer");
    const int x = v.get<int>();
    if (x <= 0) throw Error(ErrorCode::ConfigError, "scorer config: '" + k + "' must be positive");
    return x;
  };
  for (const auto& [k, v] : j.items()) {
    if (k == "lambda") c.lambda = real(k, v);
    else if (k == "mu") c.mu = real(k, v);
    else if (k == "d_max") c.d_max = real(k, v);
    else if (k == "hidden_grace") c.hidden_grace = integer(k, v);
    else if (k == "penalty") c.penalty = real(k, v);
    else if (k == "min_shape_pixels") c.min_shape_pixels = integer(k, v);
    else if (k == "hidden_speed") c.hidden_speed = real(k, v);
    else throw Error(ErrorCode::ConfigError, "scorer config: unknown key '" + k + "'");
  }
  return c;
}

std::string scorer_config_to_json(const ScorerConfig& c) {
  json j = {{"lambda", c.lambda},           {"mu", c.mu},
            {"d_max", c.d_max},             {"hidden_grace", c.hidden_grace},
            {"penalty", c.penalty},         {"min_shape_pixels", c.min_shape_pixels},
            {"hidden_speed", c.hidden_speed}};
  return j.dump(2) + "\n";
}

Submission score_split(const fs::path& split_dir, const ScorerSpec& spec, int jobs) {
  const SplitManifest m = read_manifest(split_dir);
  struct Job {
    fs::path dir;
    std::string id;
  };
  std::vector<Job> work;
  for (const auto& b : m.blocks)
    for (const auto& s : b.sets)
      for (const auto& mv : s.movies) work.push_back({movie_dir(split_dir, b.block, s.set_id, mv.movie_id), mv.movie_id});
  if (work.empty()) throw Error(ErrorCode::EmptyInput, "split " + split_dir.string() + " lists no movies");
  std::vector<double> scores(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const MovieFrames mf = load_movie(work[i].dir);
    if (mf.movie_id != work[i].id)
      throw Error(ErrorCode::ParseError, "status.json of " + work[i].dir.string() + " names another movie");
    scores[i] = score_movie(spec.kind, mf, spec.schedule, spec.config);
  });
  Submission sub;
  for (std::size_t i = 0; i < work.size(); ++i) sub[work[i].id] = scores[i];
  return sub;
}

std::vector<Submission> score_quadruplets(const std::vector<Quadruplet>& sets, const RenderConfig& rc,
                                          const std::vector<ScorerSpec>& specs, int jobs) {
  // scores[set][spec][movie]
  std::vector<std::vector<std::array<double, 4>>> scores(sets.size(), std::vector<std::array<double, 4>>(specs.size()));
  parallel_for(sets.size(), jobs, [&](std::size_t i) {
    const auto movies = render_quadruplet(sets[i], rc);
    for (std::size_t s = 0; s < specs.size(); ++s)
      for (int k = 0; k < 4; ++k)
        scores[i][s][k] = score_movie(specs[s].kind, movies[k], specs[s].schedule, specs[s].config);
  });
  std::vector<Submission> out(specs.size());
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t s = 0; s < specs.size(); ++s)
      for (int k = 0; k < 4; ++k) out[s][sets[i].movies[k].movie_id] = scores[i][s][k];
  return out;
}

}  // namespace voebench

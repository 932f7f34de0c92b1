#pragma once

// Scoring whole splits, from disk or straight from the generator.

#include <string>
#include <string_view>
#include <vector>

#include "voebench/dataset.hpp"
#include "voebench/scorers.hpp"

namespace voebench {

struct ScorerSpec {
  ScorerKind kind = ScorerKind::frame_diff;
  PredictionSchedule schedule;
  ScorerConfig config;
};

/// Reads a JSON object with any of the ScorerConfig fields; unknown keys and
/// non-positive values are ConfigError.
ScorerConfig scorer_config_from_json(std::string_view text);
std::string scorer_config_to_json(const ScorerConfig& c);

/// One score per movie of every block in the split.
Submission score_split(const fs::path& split_dir, const ScorerSpec& spec, int jobs = 0);

/// Renders each quadruplet once and scores it with every spec; result[i] belongs to specs[i].
std::vector<Submission> score_quadruplets(const std::vector<Quadruplet>& sets, const RenderConfig& rc,
                                          const std::vector<ScorerSpec>& specs, int jobs = 0);

}  // namespace voebench

#pragma once

// Self-audit of a generated split: pixel matching, splice identity, redaction, manifest
// digests and the physics of the regenerated parent world lines.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voebench/dataset.hpp"

namespace voebench {

/// The per-frame fingerprints of one quadruplet that the matching checks need.
struct SetFingerprint {
  std::string set_id;
  std::array<Label, 4> labels{};
  std::array<std::vector<std::uint64_t>, 4> frames;  ///< one hash per frame, per movie
};

/// Possible and impossible movies must show the same multiset of frames, and every
/// frame inside a splice window must be identical across the four movies when the
/// scenario is occluded. Returns the first problem found.
std::optional<std::string> check_pixel_matching(const SetFingerprint& s, const ScenarioSpec& scenario,
                                                const std::vector<SpliceWindow>& windows);

/// Fingerprint of an in-memory quadruplet (rgb_hash per frame).
SetFingerprint fingerprint(const Quadruplet& q, const RenderedPair& frames);

struct VerifyFailure {
  std::string set_id;  ///< empty for split-level problems
  std::string reason;
};

struct VerifyReport {
  int sets_checked = 0;
  std::vector<VerifyFailure> failures;  ///< in manifest order

  bool ok() const { return failures.empty(); }
};

/// Audits <dataset>/<split>. Sets are checked in parallel; failures come back in
/// manifest order so the first one is stable.
VerifyReport verify_split(const fs::path& split_dir, int jobs = 0);

}  // namespace voebench

#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "voebench/dataset.hpp"
#include "voebench/metrics.hpp"

namespace voebench {

/// Rows: static, dynamic_1, dynamic_2, total. Columns: 1, 2, 3 objects, total.
/// Empty cells hold NaN.
using MetricTable = std::array<std::array<double, 4>, 4>;

struct VisibilityTables {
  MetricTable relative{};
  MetricTable absolute{};
  // Totals as plain averages of the constituent cells, for comparison with pooling.
  MetricTable relative_cell_mean{};
  MetricTable absolute_cell_mean{};
};

struct BlockReport {
  BlockId block = BlockId::O1;
  std::array<VisibilityTables, 2> tables;  ///< indexed by Visibility
  double relative_total = 0.0;
  double absolute_total = 0.0;
  double tie_fraction = 0.0;
  int n_sets = 0;
};

struct EvalReport {
  Split split = Split::dev;
  std::vector<BlockReport> blocks;
};

struct SetRecord {
  BlockId block = BlockId::O1;
  ScenarioSpec scenario;
  std::string set_id;
  std::vector<std::pair<std::string, Label>> movies;
};

/// Joins the manifest with the sealed answers; ParseError when they disagree.
std::vector<SetRecord> set_records(const SplitManifest& m, const std::map<BlockId, Answers>& answers);
std::vector<SetRecord> set_records(const std::vector<Quadruplet>& sets);

/// Each cell aggregates only its own sets. Totals pool raw sets (L_R) and raw scores (L_A).
EvalReport build_report(const Submission& sub, const std::vector<SetRecord>& sets, Split split);

std::string report_to_json(const EvalReport& r, bool verbose = false);
std::string report_to_text(const EvalReport& r, bool verbose = false);

}  // namespace voebench

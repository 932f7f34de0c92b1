#include "voebench/eval.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "voebench/error.hpp"

namespace voebench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const char* const kRowNames[4] = {"Static", "Dynamic (1 violation)", "Dynamic (2 violations)", "Total"};
const char* const kRowKeys[4] = {"static", "dynamic_1", "dynamic_2", "total"};
const char* const kColKeys[4] = {"1", "2", "3", "total"};

struct Scored {
  const SetRecord* rec;
  ScoredSet set;
};

bool in_cell(const ScenarioSpec& s, int row, int col) {
  return (row == 3 || static_cast<int>(s.motion) == row) && (col == 3 || s.n_objects == col + 1);
}

std::pair<double, double> metrics_of(const std::vector<const ScoredSet*>& sets) {
  if (sets.empty()) return {kNaN, kNaN};
  std::vector<ScoredSet> copy;
  std::vector<double> pos, imp;
  for (const auto* s : sets) {
    copy.push_back(*s);
    pos.insert(pos.end(), s->pos_scores.begin(), s->pos_scores.end());
    imp.insert(imp.end(), s->imp_scores.begin(), s->imp_scores.end());
  }
  return {relative_error(copy), absolute_error(pos, imp)};
}

double mean_of(std::initializer_list<double> xs) {
  double s = 0;
  int n = 0;
  for (double x : xs)
    if (!std::isnan(x)) {
      s += x;
      ++n;
    }
  return n ? s / n : kNaN;
}

void fill_cell_means(const MetricTable& src, MetricTable& dst) {
  dst = src;
  for (int r = 0; r < 3; ++r) dst[r][3] = mean_of({src[r][0], src[r][1], src[r][2]});
  for (int c = 0; c < 3; ++c) dst[3][c] = mean_of({src[0][c], src[1][c], src[2][c]});
  dst[3][3] = mean_of({src[0][0], src[0][1], src[0][2], src[1][0], src[1][1], src[1][2], src[2][0], src[2][1],
                       src[2][2]});
}

nlohmann::json table_json(const MetricTable& t) {
  nlohmann::json rows = nlohmann::json::object();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::object();
    for (int c = 0; c < 4; ++c) row[kColKeys[c]] = std::isnan(t[r][c]) ? nlohmann::json(nullptr) : nlohmann::json(t[r][c]);
    rows[kRowKeys[r]] = row;
  }
  return rows;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "   -";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%4.2f", v);
  return buf;
}

std::string render_table(const std::string& title, const MetricTable& vis, const MetricTable& occ) {
  char line[256];
  std::string out = title + "\n";
  std::snprintf(line, sizeof line, "%-24s %-30s %s\n", "", "Visible", "Occluded");
  out += line;
  std::snprintf(line, sizeof line, "%-24s %6s %6s %6s %6s    %6s %6s %6s %6s\n", "Type of scene", "1 obj.", "2 obj.",
                "3 obj.", "Total", "1 obj.", "2 obj.", "3 obj.", "Total");
  out += line;
  for (int r = 0; r < 4; ++r) {
    std::snprintf(line, sizeof line, "%-24s %6s %6s %6s %6s    %6s %6s %6s %6s\n", kRowNames[r], fmt(vis[r][0]).c_str(),
                  fmt(vis[r][1]).c_str(), fmt(vis[r][2]).c_str(), fmt(vis[r][3]).c_str(), fmt(occ[r][0]).c_str(),
                  fmt(occ[r][1]).c_str(), fmt(occ[r][2]).c_str(), fmt(occ[r][3]).c_str());
    out += line;
  }
  return out;
}

}  // namespace

std::vector<SetRecord> set_records(const SplitManifest& m, const std::map<BlockId, Answers>& answers) {
  std::vector<SetRecord> out;
  for (const auto& b : m.blocks) {
    auto it = answers.find(b.block);
    if (it == answers.end())
      throw Error(ErrorCode::ParseError, "no answers for block " + std::string(to_string(b.block)));
    for (const auto& s : b.sets) {
      if (!s.scenario) throw Error(ErrorCode::ParseError, "set " + s.set_id + " has no scenario");
      auto sit = it->second.find(s.set_id);
      if (sit == it->second.end()) throw Error(ErrorCode::ParseError, "answers lack set " + s.set_id);
      SetRecord r{b.block, *s.scenario, s.set_id, {}};
      for (const auto& mv : s.movies) {
        auto lit = sit->second.find(mv.movie_id);
        if (lit == sit->second.end()) throw Error(ErrorCode::ParseError, "answers lack movie " + mv.movie_id);
        r.movies.emplace_back(mv.movie_id, lit->second);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<SetRecord> set_records(const std::vector<Quadruplet>& sets) {
  std::vector<SetRecord> out;
  for (const auto& q : sets) {
    SetRecord r{q.movies[0].scenario.block, q.movies[0].scenario, q.set_id, {}};
    for (const auto& m : q.movies) r.movies.emplace_back(m.movie_id, m.label);
    out.push_back(std::move(r));
  }
  return out;
}

EvalReport build_report(const Submission& sub, const std::vector<SetRecord>& sets, Split split) {
  EvalReport report;
  report.split = split;
  std::vector<Scored> scored;
  scored.reserve(sets.size());
  for (const auto& rec : sets) {
    ScoredSet s{rec.set_id, {}, {}};
    for (const auto& [id, label] : rec.movies) {
      auto it = sub.find(id);
      if (it == sub.end()) throw Error(ErrorCode::MissingMovie, "submission lacks movie " + id);
      (label == Label::possible ? s.pos_scores : s.imp_scores).push_back(it->second);
    }
    scored.push_back({&rec, std::move(s)});
  }

  for (const auto& blk : all_blocks()) {
    std::vector<const Scored*> mine;
    for (const auto& s : scored)
      if (s.rec->block == blk.id) mine.push_back(&s);
    if (mine.empty()) continue;
    BlockReport br;
    br.block = blk.id;
    br.n_sets = static_cast<int>(mine.size());
    for (int v = 0; v < 2; ++v) {
      auto& tabs = br.tables[v];
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          std::vector<const ScoredSet*> cell;
          for (const auto* s : mine)
            if (static_cast<int>(s->rec->scenario.visibility) == v && in_cell(s->rec->scenario, r, c))
              cell.push_back(&s->set);
          std::tie(tabs.relative[r][c], tabs.absolute[r][c]) = metrics_of(cell);
        }
      }
      fill_cell_means(tabs.relative, tabs.relative_cell_mean);
      fill_cell_means(tabs.absolute, tabs.absolute_cell_mean);
    }
    std::vector<ScoredSet> all;
    std::vector<const ScoredSet*> all_ptr;
    for (const auto* s : mine) {
      all.push_back(s->set);
      all_ptr.push_back(&s->set);
    }
    const auto rel = relative_error_detail(all);
    br.tie_fraction = rel.tie_fraction;
    std::tie(br.relative_total, br.absolute_total) = metrics_of(all_ptr);
    report.blocks.push_back(br);
  }
  return report;
}

std::string report_to_json(const EvalReport& r, bool verbose) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : r.blocks) {
    nlohmann::json jb = {{"block", to_string(b.block)},
                         {"n_sets", b.n_sets},
                         {"relative_total", b.relative_total},
                         {"absolute_total", b.absolute_total},
                         {"tie_fraction", b.tie_fraction}};
    for (int v = 0; v < 2; ++v) {
      const auto& t = b.tables[v];
      nlohmann::json half = {{"relative", table_json(t.relative)}, {"absolute", table_json(t.absolute)}};
      if (verbose) {
        half["relative_cell_mean"] = table_json(t.relative_cell_mean);
        half["absolute_cell_mean"] = table_json(t.absolute_cell_mean);
      }
      jb[std::string(to_string(static_cast<Visibility>(v)))] = half;
    }
    blocks.push_back(jb);
  }
  return nlohmann::json({{"split", to_string(r.split)}, {"blocks", blocks}}).dump(1) + "\n";
}

std::string report_to_text(const EvalReport& r, bool verbose) {
  std::string out;
  for (const auto& b : r.blocks) {
    const std::string name = std::string(to_string(b.block));
    const auto& vis = b.tables[0];
    const auto& occ = b.tables[1];
    out += render_table("Block " + name + " relative error (L_R)", vis.relative, occ.relative) + "\n";
    out += render_table("Block " + name + " absolute error (L_A)", vis.absolute, occ.absolute) + "\n";
    if (verbose) {
      out += render_table("Block " + name + " relative error, totals averaged over cells", vis.relative_cell_mean,
                          occ.relative_cell_mean) + "\n";
      out += render_table("Block " + name + " absolute error, totals averaged over cells", vis.absolute_cell_mean,
                          occ.absolute_cell_mean) + "\n";
      char line[160];
      std::snprintf(line, sizeof line, "sets %d, tied sets %.4f (strict-inequality L_R = %.4f)\n\n", b.n_sets,
                    b.tie_fraction, b.relative_total - b.tie_fraction / 2);
      out += line;
    }
  }
  return out;
}

}  // namespace voebench

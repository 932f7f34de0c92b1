#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voebench/dataset.hpp"
#include "voebench/error.hpp"
#include "voebench/eval.hpp"
#include "voebench/pipeline.hpp"
#include "voebench/png_io.hpp"
#include "voebench/verify.hpp"

namespace fs = std::filesystem;
using namespace voebench;

namespace {

constexpr const char* kRootEnv = "VOEBENCH_OUT_ROOT";

struct GenerateArgs {
  std::uint64_t seed = 0;
  std::vector<std::string> blocks;
  std::vector<std::string> splits{"dev"};
  int per_scenario = 20;
  fs::path out = "voebench_data";
  int width = 288, height = 288;
  double far_clip = 20.0;
  int jobs = 0;
};

struct ScoreArgs {
  fs::path dataset = "voebench_data";
  std::string split = "dev";
  std::string scorer;
  std::string span = "short";
  fs::path config;
  fs::path out;
  int jobs = 0;
};

struct EvalArgs {
  fs::path dataset = "voebench_data";
  std::string split = "dev";
  fs::path submission;
  std::string format = "text";
  fs::path out;
  bool verbose = false;
};

struct VerifyArgs {
  fs::path dataset = "voebench_data";
  std::vector<std::string> splits;
  int jobs = 0;
};

std::string text_of(const fs::path& p) {
  const Bytes b = read_file(p);
  return std::string(b.begin(), b.end());
}

int cmd_generate(const GenerateArgs& a) {
  DatasetSpec spec;
  spec.seed = a.seed;
  if (a.blocks.empty()) spec.blocks = {BlockId::O1, BlockId::O2, BlockId::O3};
  for (const auto& b : a.blocks) spec.blocks.push_back(parse_block(b));
  for (const auto& s : a.splits) spec.splits.push_back({parse_split(s), a.per_scenario});
  spec.render.width = a.width;
  spec.render.height = a.height;
  spec.render.far_clip = a.far_clip;
  spec.jobs = a.jobs;
  for (const auto& m : write_dataset(spec, a.out))
    std::printf("%s: %d movies, manifest digest %s\n", std::string(to_string(m.split)).c_str(), m.movie_count(),
                manifest_digest(m).c_str());
  return 0;
}

int cmd_score(const ScoreArgs& a) {
  ScorerSpec spec;
  spec.kind = parse_scorer(a.scorer);
  spec.schedule = PredictionSchedule::of(parse_span(a.span));
  if (!a.config.empty()) spec.config = scorer_config_from_json(text_of(a.config));
  const Submission sub = score_split(a.dataset / std::string(to_string(parse_split(a.split))), spec, a.jobs);
  write_submission(a.out, sub);
  std::printf("scored %zu movies with %s/%s -> %s\n", sub.size(), a.scorer.c_str(), a.span.c_str(),
              a.out.string().c_str());
  return 0;
}

int cmd_eval(const EvalArgs& a) {
  const Split split = parse_split(a.split);
  if (split == Split::train) throw Error(ErrorCode::ConfigError, "the train split has no answers to evaluate against");
  if (a.format != "text" && a.format != "json")
    throw Error(ErrorCode::ConfigError, "unknown format '" + a.format + "' (text|json)");
  const fs::path dir = a.dataset / std::string(to_string(split));
  const SplitManifest m = read_manifest(dir);
  std::map<BlockId, Answers> answers;
  for (const auto& b : m.blocks) answers[b.block] = read_answers(dir / std::string(to_string(b.block)) / "answers.json");
  const Submission sub = read_submission(a.submission, movie_ids(m));
  const EvalReport r = build_report(sub, set_records(m, answers), split);
  const std::string out = a.format == "json" ? report_to_json(r, a.verbose) : report_to_text(r, a.verbose);
  if (a.out.empty()) std::cout << out;
  else write_file(a.out, out);
  return 0;
}

int cmd_verify(const VerifyArgs& a) {
  std::vector<Split> splits;
  for (const auto& s : a.splits) splits.push_back(parse_split(s));
  if (splits.empty())
    for (Split s : {Split::train, Split::dev, Split::test})
      if (fs::exists(a.dataset / std::string(to_string(s)) / "manifest.json")) splits.push_back(s);
  if (splits.empty()) throw Error(ErrorCode::IoFailure, "no split with a manifest under " + a.dataset.string());
  bool ok = true;
  for (Split s : splits) {
    const VerifyReport r = verify_split(a.dataset / std::string(to_string(s)), a.jobs);
    const std::string name(to_string(s));
    if (r.ok()) {
      std::printf("%s: %d sets ok\n", name.c_str(), r.sets_checked);
      continue;
    }
    ok = false;
    const auto& f = r.failures.front();
    std::printf("%s: FAILED at set %s: %s\n", name.c_str(), f.set_id.empty() ? "(split)" : f.set_id.c_str(),
                f.reason.c_str());
    if (r.failures.size() > 1) std::printf("%s: %zu failures in total\n", name.c_str(), r.failures.size());
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voebench: procedural intuitive-physics benchmark"};
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate dataset splits");
  gen->add_option("--seed", ga.seed, "Master seed")->required();
  gen->add_option("--block", ga.blocks, "Blocks to generate (O1, O2, O3; repeatable; default all)");
  gen->add_option("--split", ga.splits, "Splits to generate (train, dev, test; repeatable)")->capture_default_str();
  gen->add_option("--per-scenario", ga.per_scenario,
                  "Movies per scenario (multiple of 4 for dev/test; train: possible movies per block / 18)")
      ->capture_default_str();
  gen->add_option("--out", ga.out, "Output root")->envname(kRootEnv)->capture_default_str();
  gen->add_option("--width", ga.width, "Frame width in pixels")->capture_default_str();
  gen->add_option("--height", ga.height, "Frame height in pixels")->capture_default_str();
  gen->add_option("--far-clip", ga.far_clip, "Depth saturation distance in meters")->capture_default_str();
  gen->add_option("--jobs", ga.jobs, "Worker threads (0 = logical cores)")->capture_default_str();

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Score every movie of a split with a baseline scorer");
  score->add_option("--dataset", sa.dataset, "Dataset root")->envname(kRootEnv)->capture_default_str();
  score->add_option("--split", sa.split, "dev or test")->capture_default_str();
  score->add_option("--scorer", sa.scorer, "frame_diff, tracking or mask_extrapolation")->required();
  score->add_option("--span", sa.span, "Prediction span: short or long")->capture_default_str();
  score->add_option("--config", sa.config, "JSON file overriding scorer constants");
  score->add_option("--out", sa.out, "Submission file (.json or .csv)")->required();
  score->add_option("--jobs", sa.jobs, "Worker threads (0 = logical cores)")->capture_default_str();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a submission against the sealed answers");
  eval->add_option("--dataset", ea.dataset, "Dataset root")->envname(kRootEnv)->capture_default_str();
  eval->add_option("--split", ea.split, "dev or test")->capture_default_str();
  eval->add_option("--submission", ea.submission, "Submission file (.json or .csv)")->required();
  eval->add_option("--format", ea.format, "text or json")->capture_default_str();
  eval->add_option("--out", ea.out, "Write the report here instead of stdout");
  eval->add_flag("--verbose", ea.verbose, "Also print cell-averaged totals");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Audit a generated dataset");
  ver->add_option("--dataset", va.dataset, "Dataset root")->envname(kRootEnv)->capture_default_str();
  ver->add_option("--split", va.splits, "Splits to check (default: every split present)");
  ver->add_option("--jobs", va.jobs, "Worker threads (0 = logical cores)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_generate(ga);
    if (*score) return cmd_score(sa);
    if (*eval) return cmd_eval(ea);
    if (*ver) return cmd_verify(va);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_status();
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

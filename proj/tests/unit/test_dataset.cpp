#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_util.hpp"
#include "voebench/dataset.hpp"
#include "voebench/error.hpp"
#include "voebench/png_io.hpp"

using namespace voebench;
using voebench::testing::TempDir;

namespace {

std::string slurp(const fs::path& p) {
  const Bytes b = read_file(p);
  return std::string(b.begin(), b.end());
}

DatasetSpec small_spec(std::uint64_t seed) {
  DatasetSpec s;
  s.blocks = {BlockId::O1};
  s.splits = {{Split::dev, 4}, {Split::train, 1}};
  s.seed = seed;
  s.render.width = s.render.height = 32;
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoFailure;
}

class SmallDataset : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    manifests_ = new std::vector<SplitManifest>(write_dataset(small_spec(5), dir_->path()));
  }
  static void TearDownTestSuite() {
    delete manifests_;
    delete dir_;
  }
  static fs::path split(Split s) { return dir_->path() / std::string(to_string(s)); }

  static TempDir* dir_;
  static std::vector<SplitManifest>* manifests_;
};
TempDir* SmallDataset::dir_ = nullptr;
std::vector<SplitManifest>* SmallDataset::manifests_ = nullptr;

}  // namespace

TEST_F(SmallDataset, ShapeAndRoundTrip) {
  ASSERT_EQ(manifests_->size(), 2u);
  const SplitManifest& dev = (*manifests_)[0];
  EXPECT_EQ(dev.movie_count(), 18 * 4);
  EXPECT_EQ(dev.blocks[0].sets.size(), 18u);
  EXPECT_EQ(read_manifest(split(Split::dev)), dev);
  EXPECT_EQ(manifest_from_json(manifest_to_json(dev)), dev);
  EXPECT_EQ((*manifests_)[1].movie_count(), 18);
  EXPECT_EQ(read_manifest(split(Split::train)), (*manifests_)[1]);
}

TEST_F(SmallDataset, LayoutAndCoLocation) {
  const SplitManifest& dev = (*manifests_)[0];
  const Answers ans = read_answers(split(Split::dev) / "O1" / "answers.json");
  EXPECT_EQ(ans.size(), 18u);
  for (const auto& s : dev.blocks[0].sets) {
    ASSERT_EQ(s.movies.size(), 4u);
    int pos = 0;
    for (const auto& m : s.movies) {
      EXPECT_EQ(m.movie_id.rfind(s.set_id, 0), 0u);
      const fs::path d = movie_dir(split(Split::dev), BlockId::O1, s.set_id, m.movie_id);
      EXPECT_TRUE(fs::exists(d / "rgb" / "099.png"));
      EXPECT_TRUE(fs::exists(d / "depth" / "000.png"));
      EXPECT_TRUE(fs::exists(d / "mask" / "050.png"));
      pos += ans.at(s.set_id).at(m.movie_id) == Label::possible;
    }
    EXPECT_EQ(pos, 2);
  }
}

TEST_F(SmallDataset, DevStatusIsRedacted) {
  const std::set<std::string> allowed = {"format_version", "movie_id", "n_frames", "width",
                                         "height",         "intrinsics", "depth_unit", "far_clip"};
  for (const auto& s : (*manifests_)[0].blocks[0].sets)
    for (const auto& m : s.movies) {
      const fs::path d = movie_dir(split(Split::dev), BlockId::O1, s.set_id, m.movie_id);
      const std::string text = slurp(d / "status.json");
      const auto j = nlohmann::json::parse(text);
      for (const auto& [k, v] : j.items()) EXPECT_TRUE(allowed.count(k)) << k;
      for (const char* banned : {"\"label\"", "possible", "impossible", "\"objects\"", "\"mask_ids\"", "\"frames\""})
        EXPECT_EQ(text.find(banned), std::string::npos) << banned;
      std::set<std::string> entries;
      for (const auto& e : fs::directory_iterator(d)) entries.insert(e.path().filename().string());
      EXPECT_EQ(entries, (std::set<std::string>{"depth", "mask", "rgb", "status.json"}));
    }
}

TEST_F(SmallDataset, TrainStatusCarriesGroundTruth) {
  const auto& s = (*manifests_)[1].blocks[0].sets[0];
  const fs::path d = movie_dir(split(Split::train), BlockId::O1, s.set_id, s.movies[0].movie_id);
  const auto j = nlohmann::json::parse(slurp(d / "status.json"));
  EXPECT_EQ(j.at("label"), "possible");
  EXPECT_EQ(j.at("frames").size(), 100u);
  EXPECT_TRUE(j.at("frames")[0].at("objects")[0].contains("position"));
  EXPECT_TRUE(j.at("frames")[0].contains("mask_ids"));
  EXPECT_TRUE(j.contains("camera"));
  EXPECT_FALSE(fs::exists(split(Split::train) / "O1" / "answers.json"));
}

TEST_F(SmallDataset, LoadMovieMatchesRender) {
  const auto& s = (*manifests_)[0].blocks[0].sets[3];
  const MovieFrames mf = load_movie(movie_dir(split(Split::dev), BlockId::O1, s.set_id, s.movies[2].movie_id));
  EXPECT_EQ(mf.movie_id, s.movies[2].movie_id);
  EXPECT_EQ(mf.n_frames(), 100);
  EXPECT_EQ(mf.intrinsics.width, 32);
  std::vector<std::uint64_t> hashes;
  for (const auto& f : mf.rgb) hashes.push_back(rgb_hash(f));
  EXPECT_EQ(movie_digest(hashes), s.movies[2].digest);
}

TEST(Dataset, DeterministicBytes) {
  TempDir a, b;
  DatasetSpec spec = small_spec(17);
  spec.splits = {{Split::dev, 4}};
  spec.jobs = 1;
  const auto ma = write_dataset(spec, a.path());
  spec.jobs = 3;
  const auto mb = write_dataset(spec, b.path());
  EXPECT_EQ(manifest_digest(ma[0]), manifest_digest(mb[0]));
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a.path());
    ASSERT_TRUE(fs::exists(b.path() / rel)) << rel;
    EXPECT_EQ(read_file(e.path()), read_file(b.path() / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 1 + 1 + 72 * (1 + 300));
  const auto other = write_dataset(small_spec(18), b.path());
  EXPECT_NE(manifest_digest(other[0]), manifest_digest(ma[0]));
}

TEST(Dataset, ConfigErrors) {
  TempDir d;
  DatasetSpec spec = small_spec(1);
  spec.splits = {{Split::dev, 0}};
  EXPECT_EQ(code_of([&] { write_dataset(spec, d.path()); }), ErrorCode::ConfigError);
  spec.splits = {{Split::dev, 6}};
  EXPECT_EQ(code_of([&] { write_dataset(spec, d.path()); }), ErrorCode::ConfigError);
  spec.splits = {{Split::dev, 4}};
  spec.blocks.clear();
  EXPECT_EQ(code_of([&] { write_dataset(spec, d.path()); }), ErrorCode::ConfigError);
}

TEST(Dataset, RefusesToClobberForeignDirectory) {
  TempDir d;
  fs::create_directories(d.path() / "dev");
  write_file(d.path() / "dev" / "notes.txt", std::string_view("mine"));
  EXPECT_EQ(code_of([&] { write_dataset(small_spec(1), d.path()); }), ErrorCode::IoFailure);
  EXPECT_TRUE(fs::exists(d.path() / "dev" / "notes.txt"));
}

TEST(Submission, JsonAndCsvParsing) {
  const std::vector<std::string> ids = {"a_1", "a_2", "a_3"};
  const Submission s = parse_submission_json(R"({"a_1": 0.5, "a_2": 1, "a_3": "0.25"})", ids);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.at("a_3"), 0.25);
  const Submission c = parse_submission_csv("movie_id,score\na_1,0.5\na_2, 1\n\na_3,0.25\n", ids);
  EXPECT_EQ(c, s);

  EXPECT_EQ(code_of([&] { parse_submission_json(R"({"a_1": 0.5, "a_2": 1})", ids); }), ErrorCode::MissingMovie);
  EXPECT_EQ(code_of([&] { parse_submission_json(R"({"a_1": 0.5, "a_2": 1, "a_3": 2, "a_1": 3})", ids); }),
            ErrorCode::DuplicateMovie);
  EXPECT_EQ(code_of([&] { parse_submission_csv("a_1,1\na_2,1\na_3,1\na_2,0\n", ids); }), ErrorCode::DuplicateMovie);
  EXPECT_EQ(code_of([&] { parse_submission_json(R"({"a_1": NaN, "a_2": 1, "a_3": 2})", ids); }),
            ErrorCode::NonFiniteScore);
  EXPECT_EQ(code_of([&] { parse_submission_json(R"({"a_1": "NaN", "a_2": 1, "a_3": 2})", ids); }),
            ErrorCode::NonFiniteScore);
  EXPECT_EQ(code_of([&] { parse_submission_csv("a_1,inf\na_2,1\na_3,1\n", ids); }), ErrorCode::NonFiniteScore);
  EXPECT_EQ(code_of([&] { parse_submission_json(R"({"a_1": 1, "a_2": 1, "a_3": 2, "zz": 1})", ids); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse_submission_json("[1, 2]", ids); }), ErrorCode::ParseError);
}

TEST(Submission, WriteReadRoundTrip) {
  TempDir d;
  const Submission s = {{"x_1", 0.1}, {"x_2", 1.0 / 3.0}, {"x_3", 1e-300}};
  std::vector<std::string> ids;
  for (const auto& [k, v] : s) ids.push_back(k);
  for (const char* name : {"sub.json", "sub.csv"}) {
    write_submission(d.path() / name, s);
    EXPECT_EQ(read_submission(d.path() / name, ids), s) << name;
  }
  EXPECT_EQ(code_of([&] { read_submission(d.path() / "nope.json", ids); }), ErrorCode::IoFailure);
}

TEST(Answers, SchemaRoundTrip) {
  TempDir d;
  const Answers a = {{"s1", {{"s1_1", Label::possible}, {"s1_2", Label::impossible}}}};
  const std::string text = answers_to_json(a);
  EXPECT_EQ(nlohmann::json::parse(text)["s1"]["s1_2"], "impossible");
  write_file(d.path() / "answers.json", text);
  EXPECT_EQ(read_answers(d.path() / "answers.json"), a);
}

TEST(Png, RoundTrips) {
  Plane<std::uint8_t> rgb(5, 12), g8(5, 4);
  Plane<std::uint16_t> g16(5, 4);
  for (int i = 0; i < rgb.size(); ++i) rgb.data()[i] = static_cast<std::uint8_t>(i * 7);
  for (int i = 0; i < g8.size(); ++i) g8.data()[i] = static_cast<std::uint8_t>(i);
  for (int i = 0; i < g16.size(); ++i) g16.data()[i] = static_cast<std::uint16_t>(i * 3001);
  EXPECT_TRUE((decode_png_rgb(encode_png_rgb(rgb)) == rgb).all());
  EXPECT_TRUE((decode_png_gray8(encode_png_gray8(g8)) == g8).all());
  EXPECT_TRUE((decode_png_gray16(encode_png_gray16(g16)) == g16).all());
  EXPECT_THROW(decode_png_rgb(encode_png_gray8(g8)), Error);
  EXPECT_THROW(decode_png_rgb(Bytes{1, 2, 3}), Error);
}

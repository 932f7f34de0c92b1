#include <gtest/gtest.h>
#include <json.hpp>

#include "test_util.hpp"
#include "voebench/dataset.hpp"
#include "voebench/png_io.hpp"
#include "voebench/verify.hpp"

using namespace voebench;
using voebench::testing::TempDir;

namespace {

class VerifyDataset : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    src_ = new TempDir();
    DatasetSpec s;
    s.blocks = {BlockId::O1};
    s.splits = {{Split::dev, 4}, {Split::train, 1}};
    s.seed = 11;
    s.render.width = s.render.height = 32;
    manifests_ = new std::vector<SplitManifest>(write_dataset(s, src_->path()));
  }
  static void TearDownTestSuite() {
    delete manifests_;
    delete src_;
  }

  // Each test tampers with its own copy.
  void SetUp() override { fs::copy(src_->path() / "dev", dev(), fs::copy_options::recursive); }

  fs::path dev() const { return work_.path() / "dev"; }
  static const SplitManifest& dev_manifest() { return (*manifests_)[0]; }
  static const SetEntry& set(int i) { return dev_manifest().blocks[0].sets.at(i); }
  fs::path movie(int set_index, int k) const {
    return movie_dir(dev(), BlockId::O1, set(set_index).set_id, set(set_index).movies.at(k).movie_id);
  }

  static TempDir* src_;
  static std::vector<SplitManifest>* manifests_;
  TempDir work_;
};
TempDir* VerifyDataset::src_ = nullptr;
std::vector<SplitManifest>* VerifyDataset::manifests_ = nullptr;

void flip_pixel(const fs::path& png) {
  auto img = decode_png_rgb(read_file(png));
  img(0, 0) = static_cast<std::uint8_t>(img(0, 0) ^ 0x40);
  write_file(png, encode_png_rgb(img));
}

}  // namespace

TEST_F(VerifyDataset, FreshDatasetPasses) {
  const VerifyReport r = verify_split(dev(), 2);
  EXPECT_TRUE(r.ok()) << r.failures.front().set_id << ": " << r.failures.front().reason;
  EXPECT_EQ(r.sets_checked, 18);
  const VerifyReport t = verify_split(src_->path() / "train", 2);
  EXPECT_TRUE(t.ok());
  EXPECT_EQ(t.sets_checked, 18);
}

TEST_F(VerifyDataset, CorruptedFrameNamesTheSet) {
  flip_pixel(movie(3, 1) / "rgb" / "050.png");
  const VerifyReport r = verify_split(dev(), 1);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].set_id, set(3).set_id);
  EXPECT_NE(r.failures[0].reason.find("digest"), std::string::npos) << r.failures[0].reason;
}

TEST_F(VerifyDataset, TrailingBytesInAPngAreCaught) {
  // Decodes to the same pixels, so only the file-level check sees it.
  const fs::path p = movie(10, 0) / "rgb" / "020.png";
  Bytes b = read_file(p);
  b.push_back(0);
  write_file(p, b);
  const VerifyReport r = verify_split(dev(), 1);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].set_id, set(10).set_id);
  EXPECT_EQ(r.failures[0].reason.rfind("rgb files: ", 0), 0u) << r.failures[0].reason;
}

TEST_F(VerifyDataset, LeakedAnswersIsARedactionFailure) {
  fs::copy_file(dev() / "O1" / "answers.json", movie(5, 2) / "answers.json");
  const VerifyReport r = verify_split(dev(), 1);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.failures[0].set_id, set(5).set_id);
  EXPECT_EQ(r.failures[0].reason.rfind("redaction: ", 0), 0u);
  EXPECT_NE(r.failures[0].reason.find("labels leaked"), std::string::npos);
}

TEST_F(VerifyDataset, StatusKeyOutsideTheRedactedSchema) {
  const fs::path p = movie(7, 3) / "status.json";
  const Bytes raw = read_file(p);
  auto j = nlohmann::json::parse(raw.begin(), raw.end());
  j["target_visible"] = true;
  write_file(p, j.dump(2));
  const VerifyReport r = verify_split(dev(), 1);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].set_id, set(7).set_id);
  EXPECT_NE(r.failures[0].reason.find("target_visible"), std::string::npos);
}

TEST_F(VerifyDataset, StrayFileAtSplitLevel) {
  write_file(dev() / "labels.csv", std::string_view("x"));
  const VerifyReport r = verify_split(dev(), 1);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_TRUE(r.failures[0].set_id.empty());
}

TEST_F(VerifyDataset, MissingFrame) {
  fs::remove(movie(2, 0) / "mask" / "099.png");
  const VerifyReport r = verify_split(dev(), 1);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].set_id, set(2).set_id);
}

TEST_F(VerifyDataset, SwappedLabels) {
  const fs::path p = dev() / "O1" / "answers.json";
  Answers a = read_answers(p);
  for (auto& [id, lab] : a.at(set(4).set_id)) lab = lab == Label::possible ? Label::impossible : Label::possible;
  write_file(p, answers_to_json(a));
  const VerifyReport r = verify_split(dev(), 1);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].set_id, set(4).set_id);
  EXPECT_NE(r.failures[0].reason.find("label"), std::string::npos);
}

TEST_F(VerifyDataset, FailuresComeBackInManifestOrder) {
  flip_pixel(movie(12, 0) / "rgb" / "000.png");
  flip_pixel(movie(1, 0) / "rgb" / "000.png");
  const VerifyReport r = verify_split(dev(), 3);
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0].set_id, set(1).set_id);
  EXPECT_EQ(r.failures[1].set_id, set(12).set_id);
}

TEST(PixelMatching, Rules) {
  const auto scenarios = enumerate_scenarios(BlockId::O1);
  ScenarioSpec occluded = scenarios.front(), visible = scenarios.front();
  for (const auto& s : scenarios) {
    if (s.visibility == Visibility::occluded) occluded = s;
    else visible = s;
  }
  SetFingerprint f;
  f.labels = {Label::possible, Label::impossible, Label::possible, Label::impossible};
  // Frames 0..9; A shows 1s, B shows 2s, switch inside [4,6] which is all 7s.
  auto movie = [](int first, int second) {
    std::vector<std::uint64_t> v;
    for (int t = 0; t < 10; ++t) v.push_back(t >= 4 && t <= 6 ? 7 : (t < 5 ? first : second));
    return v;
  };
  f.frames = {movie(1, 1), movie(1, 2), movie(2, 2), movie(2, 1)};
  const std::vector<SpliceWindow> w{{4, 6}};
  EXPECT_FALSE(check_pixel_matching(f, occluded, w));
  EXPECT_FALSE(check_pixel_matching(f, visible, w));

  auto g = f;
  g.frames[1][5] = 8;  // breaks both the multiset and the window
  EXPECT_TRUE(check_pixel_matching(g, visible, w));
  EXPECT_TRUE(check_pixel_matching(g, occluded, w));

  // Same multiset but the window is not identical across movies.
  auto h = f;
  std::swap(h.frames[1][5], h.frames[1][8]);
  EXPECT_FALSE(check_pixel_matching(h, visible, w));
  const auto why = check_pixel_matching(h, occluded, w);
  ASSERT_TRUE(why);
  EXPECT_NE(why->find("frame 5"), std::string::npos);

  auto l = f;
  l.labels[1] = Label::possible;
  EXPECT_TRUE(check_pixel_matching(l, visible, w));
}

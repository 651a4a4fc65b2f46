// Copyright 2026 The CMSF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmsf/dataset.hpp"

#include <gtest/gtest.h>

#include <random>

#include "cmsf/fixtures.hpp"
#include "test_util.hpp"

namespace cmsf {
namespace {

namespace fs = std::filesystem;
using testing::ScratchDir;

void write_video(const fs::path& root, const std::string& split, const std::string& id, int frames) {
  const fs::path v = root / split / id;
  for (int t = 1; t <= frames; ++t) {
    const auto n = std::to_string(t);
    write_image_png(v / "frames" / (n + ".png"), Image(32, 24));
    write_mask_png(v / "gt" / (n + ".png"), BinaryMask(32, 24));
    detail::write_text_file(v / "audio" / (n + ".wav"), "RIFF");
  }
}

TEST(LoadDatasetTest, WellFormedVideo) {
  ScratchDir dir("ds_ok");
  write_video(dir.path(), "S4", "vid_a", 5);
  const auto index = load_dataset(dir.path(), Split::S4);
  ASSERT_EQ(index.videos.size(), 1u);
  const auto& v = index.videos[0];
  EXPECT_EQ(v.video_id, "vid_a");
  ASSERT_EQ(v.frames.size(), 5u);
  ASSERT_EQ(v.gt_masks.size(), 5u);
  for (int t = 1; t <= 5; ++t) {
    const auto& f = v.frames[static_cast<std::size_t>(t - 1)];
    EXPECT_EQ(f.frame_id, "vid_a/" + std::to_string(t));
    EXPECT_EQ(f.t, t);
    EXPECT_EQ(f.width, 224);
    EXPECT_EQ(f.height, 224);
  }
  EXPECT_EQ(load_dataset(dir.path(), Split::S4), index);
}

TEST(LoadDatasetTest, WrongFrameCountNamesVideo) {
  ScratchDir dir("ds_four");
  write_video(dir.path(), "MS3", "short_clip", 4);
  try {
    load_dataset(dir.path(), Split::MS3);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("short_clip"), std::string::npos);
  }
}

TEST(LoadDatasetTest, MissingAndUnreadableMedia) {
  ScratchDir dir("ds_bad");
  EXPECT_THROW(load_dataset(dir.path(), Split::S4), LoadError);

  write_video(dir.path(), "S4", "v1", 5);
  fs::remove(dir / "S4/v1/gt/3.png");
  try {
    load_dataset(dir.path(), Split::S4);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("3.png"), std::string::npos);
  }

  write_video(dir.path(), "S4", "v1", 5);
  fs::remove(dir / "S4/v1/audio/5.wav");
  EXPECT_THROW(load_dataset(dir.path(), Split::S4), LoadError);

  write_video(dir.path(), "S4", "v1", 5);
  detail::write_text_file(dir / "S4/v1/frames/2.png", "garbage");
  EXPECT_THROW(load_dataset(dir.path(), Split::S4), LoadError);
}

TEST(LoadDatasetTest, GroundTruthPngForegroundCount) {
  ScratchDir dir("ds_gt");
  // 6x4 mask: two foreground rectangles, 2x2 and 1x3 -> 7 pixels.
  std::vector<std::uint8_t> gray(24, 0);
  for (int y : {0, 1})
    for (int x : {0, 1}) gray[static_cast<std::size_t>(y * 6 + x)] = 255;
  for (int y : {1, 2, 3}) gray[static_cast<std::size_t>(y * 6 + 5)] = 255;
  detail::write_png(dir / "gt.png", PNG_FORMAT_GRAY, 6, 4, gray.data());
  const auto m = read_mask_png(dir / "gt.png");
  EXPECT_EQ(m.count(), 7u);
  EXPECT_TRUE(m.at(5, 3));
  EXPECT_FALSE(m.at(4, 3));
  const auto runs = m.runs();
  std::uint64_t total = 0;
  for (auto r : runs) total += r;
  EXPECT_EQ(total, 24u);
}

TEST(ResizeTest, NearestNeighbour) {
  BinaryMask m(2, 2);
  m.set(0, 0);
  const auto up = resize_nearest(m, 4, 4);
  BinaryMask expected(4, 4);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) expected.set(x, y);
  EXPECT_EQ(up, expected);

  const auto full = resize_nearest(BinaryMask(448, 448).complement(), 224, 224);
  EXPECT_EQ(full.count(), 224u * 224u);

  std::mt19937_64 rng(3);
  const auto r = testing::random_mask(rng, 224, 224);
  EXPECT_EQ(resize_nearest(r, 224, 224), r);
  // Exact 2x downsample picks the odd source pixels.
  const auto down = resize_nearest(r, 112, 112);
  for (int y = 0; y < 112; ++y)
    for (int x = 0; x < 112; ++x) ASSERT_EQ(down.at(x, y), r.at(2 * x + 1, 2 * y + 1));
}

TEST(ResizeTest, Bilinear) {
  Image img(224, 224);
  std::mt19937_64 rng(4);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng());
  EXPECT_EQ(resize_bilinear(img, 224, 224), img);

  Image flat(50, 30);
  std::fill(flat.rgb.begin(), flat.rgb.end(), std::uint8_t{77});
  const auto r = resize_bilinear(flat, 224, 224);
  EXPECT_TRUE(std::all_of(r.rgb.begin(), r.rgb.end(), [](std::uint8_t v) { return v == 77; }));

  // Exact 2x downsample averages each 2x2 block.
  Image src(8, 8);
  for (auto& v : src.rgb) v = static_cast<std::uint8_t>(rng() % 256);
  const auto half = resize_bilinear(src, 4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      for (int c = 0; c < 3; ++c) {
        const double avg = (src.pixel(2 * x, 2 * y)[c] + src.pixel(2 * x + 1, 2 * y)[c] +
                            src.pixel(2 * x, 2 * y + 1)[c] + src.pixel(2 * x + 1, 2 * y + 1)[c]) /
                           4.0;
        EXPECT_NEAR(half.pixel(x, y)[c], avg, 0.5 + 1e-9);
      }
}

TEST(ResizeTest, PolicyBringsPairsTo224) {
  const auto [img, gt] = resize_policy(Image(320, 240), BinaryMask(320, 240).complement());
  EXPECT_EQ(img.width, 224);
  EXPECT_EQ(img.height, 224);
  EXPECT_EQ(gt.count(), 224u * 224u);
}

TEST(FixturesTest, GeneratedTreeLoadsAndIsSeedDeterministic) {
  ScratchDir dir("fixtures");
  const auto a = make_fixtures(dir / "a", 0);
  make_fixtures(dir / "b", 0);
  make_fixtures(dir / "c", 1);
  for (auto split : {Split::S4, Split::MS3}) {
    const auto index = load_dataset(a.dataset, split);
    EXPECT_EQ(index.videos.size(), 2u);
    for (const auto& v : index.videos)
      for (const auto& p : v.gt_masks) EXPECT_EQ(load_gt_mask(p).width(), 224);
  }
  EXPECT_NO_THROW(load_bundle(a.bundle));
  EXPECT_NO_THROW(load_bundle(dir / "c/bundle"));
  EXPECT_EQ(bundle_hash(a.bundle), bundle_hash(dir / "b/bundle"));
  EXPECT_NE(bundle_hash(a.bundle), bundle_hash(dir / "c/bundle"));
}

}  // namespace
}  // namespace cmsf

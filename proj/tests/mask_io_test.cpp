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

#include "cmsf/mask_io.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace cmsf {
namespace {

TEST(RleJsonTest, SchemaAndRoundTrip) {
  const auto m = testing::mask_from_string(4, 1, "0110");
  const auto j = mask_to_rle_json(m);
  EXPECT_EQ(j.at("width"), 4);
  EXPECT_EQ(j.at("height"), 1);
  EXPECT_EQ(j.at("runs"), nlohmann::json({1, 2, 1}));
  EXPECT_EQ(mask_from_rle_json(j), m);
  EXPECT_THROW(mask_from_rle_json(nlohmann::json{{"width", 2}}), InvalidArgument);
  EXPECT_THROW(mask_from_rle_json(nlohmann::json{{"width", 2}, {"height", 2}, {"runs", {1}}}), ShapeError);
}

TEST(MaskPngTest, RoundTripIsBitExact) {
  testing::ScratchDir dir("maskpng");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto m = testing::random_mask(rng, 1 + static_cast<int>(rng() % 50), 1 + static_cast<int>(rng() % 50));
    const auto path = dir / ("m" + std::to_string(i) + ".png");
    write_mask_png(path, m);
    EXPECT_EQ(read_mask_png(path), m);
    // Re-encoding the decoded mask reproduces the file byte for byte.
    const auto bytes = detail::read_text_file(path);
    write_mask_png(dir / "again.png", read_mask_png(path));
    EXPECT_EQ(detail::read_text_file(dir / "again.png"), bytes);
  }
}

TEST(MaskPngTest, StoresForegroundAs255) {
  testing::ScratchDir dir("mask255");
  BinaryMask m(3, 1);
  m.set(1, 0);
  write_mask_png(dir / "m.png", m);
  int w = 0, h = 0;
  const auto gray = detail::read_png(dir / "m.png", PNG_FORMAT_GRAY, w, h);
  EXPECT_EQ(gray, (std::vector<std::uint8_t>{0, 255, 0}));
}

TEST(MaskRleFileTest, RoundTrip) {
  testing::ScratchDir dir("maskrle");
  std::mt19937_64 rng(17);
  const auto m = testing::random_mask(rng, 13, 9);
  write_mask_rle(dir / "m.rle.json", m);
  EXPECT_EQ(read_mask_rle(dir / "m.rle.json"), m);
}

TEST(ImagePngTest, RoundTripAndErrors) {
  testing::ScratchDir dir("img");
  Image img(5, 3);
  for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 17);
  write_image_png(dir / "i.png", img);
  EXPECT_EQ(read_image_png(dir / "i.png"), img);
  EXPECT_EQ(png_dimensions(dir / "i.png"), std::make_pair(5, 3));
  detail::write_text_file(dir / "bad.png", "not a png");
  EXPECT_THROW(read_image_png(dir / "bad.png"), LoadError);
  EXPECT_THROW(read_mask_png(dir / "missing.png"), LoadError);
}

}  // namespace
}  // namespace cmsf

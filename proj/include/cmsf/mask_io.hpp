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

#pragma once

// Mask and image serialization: RLE-JSON and 8-bit PNG (via libpng).

#include <png.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmsf/error.hpp"
#include "cmsf/geometry.hpp"

namespace cmsf {

/// Interleaved 8-bit RGB image.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // width * height * 3

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* pixel(int x, int y) { return &rgb[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

inline nlohmann::json mask_to_rle_json(const BinaryMask& m) {
  return {{"width", m.width()}, {"height", m.height()}, {"runs", m.runs()}};
}

inline BinaryMask mask_from_rle_json(const nlohmann::json& j) {
  try {
    const int w = j.at("width").get<int>();
    const int h = j.at("height").get<int>();
    const auto runs = j.at("runs").get<std::vector<std::uint32_t>>();
    return BinaryMask::from_runs(w, h, runs);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed RLE mask: ") + e.what());
  }
}

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

inline std::vector<std::uint8_t> read_png(const std::filesystem::path& path, png_uint_32 format, int& width,
                                          int& height) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    throw LoadError("unreadable PNG " + path.string() + ": " + png.image.message);
  }
  png.image.format = format;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr)) {
    throw LoadError("corrupt PNG " + path.string() + ": " + png.image.message);
  }
  width = static_cast<int>(png.image.width);
  height = static_cast<int>(png.image.height);
  return buf;
}

inline void write_png(const std::filesystem::path& path, png_uint_32 format, int width, int height,
                      const std::uint8_t* data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;
  if (!png_image_write_to_file(&png.image, path.c_str(), 0, data, 0, nullptr)) {
    throw Error("cannot write PNG " + path.string() + ": " + png.image.message);
  }
}

}  // namespace detail

/// Width and height from the PNG header without decoding pixel data.
inline std::pair<int, int> png_dimensions(const std::filesystem::path& path) {
  detail::PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    throw LoadError("unreadable PNG " + path.string() + ": " + png.image.message);
  }
  return {static_cast<int>(png.image.width), static_cast<int>(png.image.height)};
}

/// Grayscale PNG -> mask; values >= 128 are foreground.
inline BinaryMask read_mask_png(const std::filesystem::path& path) {
  int w = 0, h = 0;
  auto gray = detail::read_png(path, PNG_FORMAT_GRAY, w, h);
  for (auto& v : gray) v = v >= 128 ? 1 : 0;
  return BinaryMask::from_pixels(w, h, gray);
}

/// Writes foreground as 255 and background as 0.
inline void write_mask_png(const std::filesystem::path& path, const BinaryMask& m) {
  std::vector<std::uint8_t> gray(m.pixels().begin(), m.pixels().end());
  for (auto& v : gray) v = v ? 255 : 0;
  detail::write_png(path, PNG_FORMAT_GRAY, m.width(), m.height(), gray.data());
}

inline Image read_image_png(const std::filesystem::path& path) {
  Image img;
  img.rgb = detail::read_png(path, PNG_FORMAT_RGB, img.width, img.height);
  return img;
}

inline void write_image_png(const std::filesystem::path& path, const Image& img) {
  detail::write_png(path, PNG_FORMAT_RGB, img.width, img.height, img.rgb.data());
}

inline BinaryMask read_mask_rle(const std::filesystem::path& path) {
  return mask_from_rle_json(detail::read_json_file(path));
}

inline void write_mask_rle(const std::filesystem::path& path, const BinaryMask& m) {
  detail::write_text_file(path, mask_to_rle_json(m).dump() + "\n");
}

}  // namespace cmsf

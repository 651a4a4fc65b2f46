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

// AVSBench-style dataset tree:
//   <root>/<split>/<video_id>/frames/<t>.png
//   <root>/<split>/<video_id>/audio/<t>.wav
//   <root>/<split>/<video_id>/gt/<t>.png          t = 1..5

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmsf/backend.hpp"
#include "cmsf/error.hpp"
#include "cmsf/mask_io.hpp"

namespace cmsf {

inline constexpr int kFramesPerVideo = 5;

enum class Split { S4, MS3 };

inline const char* to_string(Split s) { return s == Split::S4 ? "S4" : "MS3"; }

inline std::optional<Split> split_from_string(const std::string& s) {
  if (s == "S4") return Split::S4;
  if (s == "MS3") return Split::MS3;
  return std::nullopt;
}

struct VideoEntry {
  std::string video_id;
  std::vector<FramePair> frames;                  // t = 1..5
  std::vector<std::filesystem::path> gt_masks;    // aligned with frames

  friend bool operator==(const VideoEntry& a, const VideoEntry& b) {
    if (a.video_id != b.video_id || a.gt_masks != b.gt_masks || a.frames.size() != b.frames.size()) return false;
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
      const auto& x = a.frames[i];
      const auto& y = b.frames[i];
      if (x.frame_id != y.frame_id || x.image_path != y.image_path || x.audio_path != y.audio_path || x.t != y.t ||
          x.width != y.width || x.height != y.height)
        return false;
    }
    return true;
  }
};

struct DatasetIndex {
  Split split = Split::S4;
  std::vector<VideoEntry> videos;  // sorted by video_id

  std::vector<FramePair> all_frames() const {
    std::vector<FramePair> out;
    for (const auto& v : videos) out.insert(out.end(), v.frames.begin(), v.frames.end());
    return out;
  }

  friend bool operator==(const DatasetIndex&, const DatasetIndex&) = default;
};

inline std::string make_frame_id(const std::string& video_id, int t) { return video_id + "/" + std::to_string(t); }

/// Bilinear resampling with half-pixel centres and edge clamping.
inline Image resize_bilinear(const Image& src, int width, int height) {
  if (src.width <= 0 || src.height <= 0 || width <= 0 || height <= 0)
    throw InvalidArgument("resize: dimensions must be positive");
  if (src.width == width && src.height == height) return src;
  Image dst(width, height);
  const double sx = static_cast<double>(src.width) / width;
  const double sy = static_cast<double>(src.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = src.pixel(x0, y0)[c] * (1 - wx) + src.pixel(x1, y0)[c] * wx;
        const double bottom = src.pixel(x0, y1)[c] * (1 - wx) + src.pixel(x1, y1)[c] * wx;
        dst.pixel(x, y)[c] = static_cast<std::uint8_t>(std::lround(std::clamp(top * (1 - wy) + bottom * wy, 0.0, 255.0)));
      }
    }
  }
  return dst;
}

/// Nearest-neighbour resampling; source index floor((d + 0.5) * src / dst).
inline BinaryMask resize_nearest(const BinaryMask& src, int width, int height) {
  if (src.width() <= 0 || src.height() <= 0 || width <= 0 || height <= 0)
    throw InvalidArgument("resize: dimensions must be positive");
  if (src.width() == width && src.height() == height) return src;
  BinaryMask dst(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(src.height() - 1, static_cast<int>((y + 0.5) * src.height() / height));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(src.width() - 1, static_cast<int>((x + 0.5) * src.width() / width));
      if (src.at(sx, sy)) dst.set(x, y);
    }
  }
  return dst;
}

/// Brings a frame and its ground truth to the 224 x 224 working resolution.
inline std::pair<Image, BinaryMask> resize_policy(const Image& image, const BinaryMask& gt) {
  return {resize_bilinear(image, kFrameSize, kFrameSize), resize_nearest(gt, kFrameSize, kFrameSize)};
}

inline BinaryMask load_gt_mask(const std::filesystem::path& path) {
  return resize_nearest(read_mask_png(path), kFrameSize, kFrameSize);
}

/// Indexes one split and checks that every frame, audio clip and mask is
/// present and every PNG header is readable.
inline DatasetIndex load_dataset(const std::filesystem::path& root, Split split) {
  namespace fs = std::filesystem;
  const fs::path split_dir = root / to_string(split);
  if (!fs::is_directory(split_dir)) throw LoadError("split directory not found: " + split_dir.string());

  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(split_dir))
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());

  DatasetIndex index;
  index.split = split;
  for (const auto& id : ids) {
    const fs::path vdir = split_dir / id;
    for (const char* sub : {"frames", "audio", "gt"}) {
      if (!fs::is_directory(vdir / sub)) throw LoadError("video " + id + ": missing " + (vdir / sub).string());
    }
    std::size_t frame_files = 0;
    for (const auto& f : fs::directory_iterator(vdir / "frames"))
      if (f.is_regular_file() && f.path().extension() == ".png") ++frame_files;
    if (frame_files != kFramesPerVideo) {
      throw LoadError("video " + id + ": expected " + std::to_string(kFramesPerVideo) + " frames, found " +
                      std::to_string(frame_files) + " in " + (vdir / "frames").string());
    }

    VideoEntry video;
    video.video_id = id;
    for (int t = 1; t <= kFramesPerVideo; ++t) {
      const std::string name = std::to_string(t);
      FramePair fp;
      fp.frame_id = make_frame_id(id, t);
      fp.t = t;
      fp.image_path = vdir / "frames" / (name + ".png");
      fp.audio_path = vdir / "audio" / (name + ".wav");
      const fs::path gt = vdir / "gt" / (name + ".png");
      for (const auto& p : {fp.image_path, fp.audio_path, gt})
        if (!fs::is_regular_file(p)) throw LoadError("video " + id + ": missing " + p.string());
      png_dimensions(fp.image_path);
      png_dimensions(gt);
      video.frames.push_back(std::move(fp));
      video.gt_masks.push_back(gt);
    }
    index.videos.push_back(std::move(video));
  }
  return index;
}

}  // namespace cmsf

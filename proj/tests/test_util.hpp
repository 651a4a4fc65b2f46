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

// Shared test helpers: scratch directories, random generators and the
// brute-force oracles the library results are checked against. The oracles
// deliberately avoid the library's own kernels.

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cmsf/geometry.hpp"

namespace cmsf::testing {

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cmsf_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density = -1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p = density < 0 ? u(rng) : density;
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (u(rng) < p) m.set(x, y);
  return m;
}

inline BinaryMask mask_from_string(int w, int h, const std::string& bits) {
  BinaryMask m(w, h);
  for (int i = 0; i < w * h; ++i)
    if (bits[static_cast<std::size_t>(i)] == '1') m.set(i % w, i / w);
  return m;
}

inline BoundingBox random_box(std::mt19937_64& rng, double extent = 64.0) {
  std::uniform_real_distribution<double> pos(0.0, extent);
  std::uniform_real_distribution<double> size(1.0, extent / 2);
  const double x = pos(rng), y = pos(rng);
  return {x, y, x + size(rng), y + size(rng)};
}

struct PixelCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline PixelCounts count_pixels(const BinaryMask& pred, const BinaryMask& gt) {
  PixelCounts c;
  for (int y = 0; y < gt.height(); ++y)
    for (int x = 0; x < gt.width(); ++x) {
      const bool p = pred.at(x, y), g = gt.at(x, y);
      if (p && g) ++c.tp;
      else if (p) ++c.fp;
      else if (g) ++c.fn;
      else ++c.tn;
    }
  return c;
}

inline double oracle_iou(const BinaryMask& a, const BinaryMask& b) {
  const auto c = count_pixels(a, b);
  const long uni = c.tp + c.fp + c.fn;
  return uni == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(uni);
}

struct OracleF {
  double p, r, f;
};

/// F-measure from raw counts with the documented empty-mask conventions.
inline OracleF oracle_fscore(const BinaryMask& pred, const BinaryMask& gt, double beta_sq) {
  const auto c = count_pixels(pred, gt);
  const long pred_n = c.tp + c.fp, gt_n = c.tp + c.fn;
  if (pred_n == 0 && gt_n == 0) return {1, 1, 1};
  const double p = pred_n == 0 ? 1.0 : double(c.tp) / double(pred_n);
  const double r = gt_n == 0 ? 1.0 : double(c.tp) / double(gt_n);
  const double denom = beta_sq * p + r;
  const double f = (c.tp == 0 || denom == 0.0) ? 0.0 : (1 + beta_sq) * p * r / denom;
  return {p, r, f};
}

inline double oracle_box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  return inter / ((a.x_max - a.x_min) * (a.y_max - a.y_min) + (b.x_max - b.x_min) * (b.y_max - b.y_min) - inter);
}

/// O(n^2) NMS reference: repeatedly pick the best remaining box (earliest on
/// ties) and strike every remaining box overlapping it.
inline std::vector<ScoredBox> reference_nms(const std::vector<ScoredBox>& boxes, double threshold) {
  std::vector<bool> alive(boxes.size(), true);
  std::vector<ScoredBox> kept;
  for (;;) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < boxes.size(); ++i)
      if (alive[i] && (!best || boxes[i].score > boxes[*best].score)) best = i;
    if (!best) break;
    alive[*best] = false;
    kept.push_back(boxes[*best]);
    for (std::size_t i = 0; i < boxes.size(); ++i)
      if (alive[i] && oracle_box_iou(boxes[*best].box, boxes[i].box) > threshold) alive[i] = false;
  }
  return kept;
}

inline BinaryMask oracle_or(const std::vector<BinaryMask>& masks, int w, int h) {
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (const auto& m : masks)
        if (m.at(x, y)) out.set(x, y);
  return out;
}

/// True when every foreground pixel of `sub` is foreground in `super`.
inline bool is_subset(const BinaryMask& sub, const BinaryMask& super) {
  for (int y = 0; y < sub.height(); ++y)
    for (int x = 0; x < sub.width(); ++x)
      if (sub.at(x, y) && !super.at(x, y)) return false;
  return true;
}

}  // namespace cmsf::testing

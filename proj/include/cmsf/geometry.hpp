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

// Box and binary-mask arithmetic shared by every pipeline: IoU, greedy NMS,
// rasterization, union, tight boxes and the run-length codec.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmsf/error.hpp"

namespace cmsf {

/// Axis-aligned box in continuous pixel coordinates, origin top-left.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  /// Finite, non-negative and strictly positive area.
  bool is_valid() const {
    return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
           std::isfinite(y_max) && x_min >= 0.0 && y_min >= 0.0 && x_min < x_max &&
           y_min < y_max;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ScoredBox {
  BoundingBox box;
  double score = 0.0;

  friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

/// H x W binary label image stored row-major, one byte per pixel (0 or 1).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidArgument("mask dimensions must be non-negative");
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  }

  /// Builds a mask from a row-major pixel buffer; any nonzero byte is foreground.
  static BinaryMask from_pixels(int width, int height, std::span<const std::uint8_t> pixels) {
    BinaryMask m(width, height);
    if (pixels.size() != m.pixels_.size()) throw ShapeError("pixel buffer size does not match mask dimensions");
    std::transform(pixels.begin(), pixels.end(), m.pixels_.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(v != 0); });
    return m;
  }

  /// Decodes background-first alternating run lengths.
  static BinaryMask from_runs(int width, int height, std::span<const std::uint32_t> runs) {
    BinaryMask m(width, height);
    std::size_t pos = 0;
    std::uint8_t value = 0;
    for (std::uint32_t run : runs) {
      if (run > m.pixels_.size() - pos) throw ShapeError("run lengths exceed width*height");
      std::fill_n(m.pixels_.begin() + static_cast<std::ptrdiff_t>(pos), run, value);
      pos += run;
      value ^= 1;
    }
    if (pos != m.pixels_.size()) throw ShapeError("run lengths do not sum to width*height");
    return m;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty_area() const { return pixels_.empty(); }

  bool at(int x, int y) const { return pixels_[index(x, y)] != 0; }
  void set(int x, int y, bool fg = true) { pixels_[index(x, y)] = fg ? 1 : 0; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(pixels_.begin(), pixels_.end(), std::uint8_t{1}));
  }
  bool any() const { return std::find(pixels_.begin(), pixels_.end(), std::uint8_t{1}) != pixels_.end(); }

  bool same_shape(const BinaryMask& o) const { return width_ == o.width_ && height_ == o.height_; }

  /// Alternating run lengths in row-major order, starting with a (possibly
  /// zero-length) background run.
  std::vector<std::uint32_t> runs() const {
    std::vector<std::uint32_t> out;
    std::uint8_t current = 0;
    std::uint32_t length = 0;
    for (std::uint8_t p : pixels_) {
      if (p != current) {
        out.push_back(length);
        length = 0;
        current = p;
      }
      ++length;
    }
    out.push_back(length);
    return out;
  }

  BinaryMask complement() const {
    BinaryMask m = *this;
    for (auto& p : m.pixels_) p ^= 1;
    return m;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) throw InvalidArgument("pixel out of range");
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

namespace detail {

inline void require_same_shape(const BinaryMask& a, const BinaryMask& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": mask " + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                     std::to_string(b.height()));
  }
}

}  // namespace detail

/// Pixel IoU. Two empty masks score 1 (nothing predicted, nothing present).
inline double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  detail::require_same_shape(a, b, "mask_iou");
  std::size_t inter = 0;
  std::size_t uni = 0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    inter += pa[i] & pb[i];
    uni += pa[i] | pb[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Greedy NMS returning indices into `boxes`, highest score first. A box is
/// dropped when its IoU with an already kept box exceeds `iou_threshold`.
/// Equal scores keep input order.
inline std::vector<std::size_t> nms_indices(std::span<const ScoredBox> boxes, double iou_threshold) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) throw InvalidArgument("nms iou_threshold must be in [0,1]");
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return boxes[a].score > boxes[b].score; });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return box_iou(boxes[i].box, boxes[k].box) > iou_threshold;
    });
    if (!suppressed) kept.push_back(i);
  }
  return kept;
}

inline std::vector<ScoredBox> nms(std::span<const ScoredBox> boxes, double iou_threshold) {
  std::vector<ScoredBox> out;
  for (std::size_t i : nms_indices(boxes, iou_threshold)) out.push_back(boxes[i]);
  return out;
}

/// Pixel (x, y) is foreground iff ceil(x_min) <= x < ceil(x_max) and likewise
/// for y, after clamping to the frame.
inline BinaryMask rasterize_box(const BoundingBox& box, int width, int height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("rasterize_box: frame dimensions must be positive");
  BinaryMask m(width, height);
  auto clamp_edge = [](double v, int limit) {
    if (!std::isfinite(v)) return v > 0 ? limit : 0;
    const double c = std::ceil(v);
    if (c <= 0.0) return 0;
    if (c >= static_cast<double>(limit)) return limit;
    return static_cast<int>(c);
  };
  const int x0 = clamp_edge(box.x_min, width);
  const int x1 = clamp_edge(box.x_max, width);
  const int y0 = clamp_edge(box.y_min, height);
  const int y1 = clamp_edge(box.y_max, height);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) m.set(x, y);
  return m;
}

/// Pixelwise OR. The dimensions are given explicitly so an empty list still
/// produces a mask.
inline BinaryMask mask_union(std::span<const BinaryMask> masks, int width, int height) {
  BinaryMask out(width, height);
  std::vector<std::uint8_t> acc(out.size(), 0);
  for (const auto& m : masks) {
    detail::require_same_shape(out, m, "mask_union");
    auto p = m.pixels();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] |= p[i];
  }
  return BinaryMask::from_pixels(width, height, acc);
}

inline BinaryMask mask_union(std::span<const BinaryMask> masks) {
  if (masks.empty()) throw InvalidArgument("mask_union: empty list needs explicit dimensions");
  return mask_union(masks, masks.front().width(), masks.front().height());
}

/// Smallest half-open box covering all foreground pixels.
inline std::optional<BoundingBox> tight_bbox(const BinaryMask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return std::nullopt;
  return BoundingBox{static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 + 1),
                     static_cast<double>(y1 + 1)};
}

}  // namespace cmsf

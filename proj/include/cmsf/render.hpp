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

#include <array>
#include <cmath>
#include <cstdint>

#include "cmsf/error.hpp"
#include "cmsf/geometry.hpp"
#include "cmsf/mask_io.hpp"

namespace cmsf {

struct OverlayStyle {
  std::array<std::uint8_t, 3> tint{255, 0, 0};
  double alpha = 0.5;
};

/// Alpha-blends `tint` over the foreground pixels; background is untouched.
inline Image overlay_mask(const Image& image, const BinaryMask& mask, const OverlayStyle& style = {}) {
  if (image.width != mask.width() || image.height != mask.height()) {
    throw ShapeError("overlay: image " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                     " vs mask " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()));
  }
  Image out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (!mask.at(x, y)) continue;
      auto* p = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) {
        p[c] = static_cast<std::uint8_t>(std::lround((1.0 - style.alpha) * p[c] + style.alpha * style.tint[c]));
      }
    }
  }
  return out;
}

}  // namespace cmsf

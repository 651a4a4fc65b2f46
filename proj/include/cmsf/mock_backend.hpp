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

// Deterministic stand-in for the foundation models. Each frame gets a small
// synthetic scene (a few labelled objects, some of them sounding) derived
// from (seed, frame_id); every capability answers consistently with it.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cmsf/backend.hpp"
#include "cmsf/hash.hpp"

namespace cmsf {

class MockBackend final : public Backend {
 public:
  struct SceneObject {
    BoundingBox box;
    std::string label;
    int class_index = 0;
    bool sounding = false;
    double quality = 0.0;
  };

  explicit MockBackend(std::uint64_t seed, std::size_t embedding_dim = 16)
      : seed_(seed), embedding_dim_(embedding_dim) {
    if (embedding_dim_ < 2) throw InvalidArgument("mock embedding dim must be >= 2");
  }

  std::uint64_t seed() const { return seed_; }
  std::size_t embedding_dim() const { return embedding_dim_; }

  std::vector<SceneObject> scene(const FramePair& frame) const {
    SplitMix64 rng = stream(frame.frame_id, "scene");
    const int n = 2 + static_cast<int>(rng.below(3));
    std::vector<SceneObject> objects;
    bool any_sounding = false;
    for (int i = 0; i < n; ++i) {
      SceneObject o;
      const double w = rng.uniform(0.15, 0.5) * frame.width;
      const double h = rng.uniform(0.15, 0.5) * frame.height;
      const double x = std::floor(rng.uniform(0.0, frame.width - w));
      const double y = std::floor(rng.uniform(0.0, frame.height - h));
      o.box = {x, y, std::floor(x + w), std::floor(y + h)};
      const auto& entry = kLabels[rng.below(kLabels.size())];
      o.label = entry.label;
      o.class_index = entry.class_index;
      o.sounding = rng.uniform() < 0.5;
      o.quality = rng.uniform(0.8, 0.99);
      any_sounding = any_sounding || o.sounding;
      objects.push_back(o);
    }
    if (!any_sounding) objects.front().sounding = true;
    return objects;
  }

  std::vector<AudioTag> tag_audio(const FramePair& frame) const override {
    const auto objects = scene(frame);
    SplitMix64 rng = stream(frame.frame_id, "tags");
    std::vector<AudioTag> tags;
    for (const auto& entry : kLabels) {
      bool sounding = false;
      for (const auto& o : objects) sounding = sounding || (o.sounding && o.label == entry.label);
      const double p = sounding ? rng.uniform(0.3, 0.97) : rng.uniform(0.0, 0.6);
      tags.push_back({entry.label, entry.class_index, p});
    }
    std::stable_sort(tags.begin(), tags.end(),
                     [](const AudioTag& a, const AudioTag& b) { return a.probability > b.probability; });
    return tags;
  }

  std::vector<ScoredBox> detect_grounded(const FramePair& frame,
                                         const std::vector<std::string>& phrases) const override {
    if (phrases.empty()) throw InvalidArgument("detect_grounded needs at least one phrase");
    const auto objects = scene(frame);
    std::vector<ScoredBox> out;
    for (const auto& phrase : phrases) {
      SplitMix64 rng = stream(frame.frame_id, "ground:" + phrase);
      for (const auto& o : objects) {
        if (o.label != phrase) continue;
        out.push_back({jitter(o.box, rng, frame), rng.uniform(0.35, 0.95)});
      }
      if (rng.uniform() < 0.3) out.push_back({random_box(rng, frame), rng.uniform(0.1, 0.5)});
    }
    return out;
  }

  std::vector<ScoredBox> propose_class_agnostic(const FramePair& frame) const override {
    const auto objects = scene(frame);
    SplitMix64 rng = stream(frame.frame_id, "proposals");
    std::vector<ScoredBox> out;
    for (const auto& o : objects) out.push_back({jitter(o.box, rng, frame), rng.uniform(0.3, 1.0)});
    const int clutter = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < clutter; ++i) out.push_back({random_box(rng, frame), rng.uniform(0.0, 0.8)});
    return out;
  }

  std::vector<MaskCandidate> segment(const FramePair& frame, const PromptSet& prompts) const override {
    std::vector<MaskCandidate> out;
    if (const auto* boxes = std::get_if<BoxPrompts>(&prompts)) {
      if (boxes->empty()) throw InvalidArgument("segment needs at least one prompt");
      for (const auto& b : *boxes) {
        const std::string q = box_prompt_qualifier(b);
        SplitMix64 rng = stream(frame.frame_id, q);
        const int n = 1 + static_cast<int>(rng.below(2));
        for (int i = 0; i < n; ++i) {
          BoundingBox inner = shrink(b, rng.uniform(0.0, 0.15 + 0.1 * i));
          out.push_back({rasterize_box(inner, frame.width, frame.height), rng.uniform(0.75, 1.0), q});
        }
      }
      return out;
    }
    const auto& points = std::get<PointPrompts>(prompts);
    if (points.empty()) throw InvalidArgument("segment needs at least one prompt");
    const auto objects = scene(frame);
    const std::string q = point_prompt_qualifier(points);
    SplitMix64 rng = stream(frame.frame_id, q);
    for (const auto& p : points) {
      char origin[48];
      std::snprintf(origin, sizeof(origin), "point:%.1f,%.1f", p.x, p.y);
      for (const auto& o : objects) {
        if (p.x < o.box.x_min || p.x >= o.box.x_max || p.y < o.box.y_min || p.y >= o.box.y_max) continue;
        const double quality = std::clamp(o.quality + rng.uniform(-0.08, 0.01), 0.0, 1.0);
        out.push_back({rasterize_box(shrink(o.box, 0.05), frame.width, frame.height), quality, origin});
      }
      if (rng.uniform() < 0.05) {
        out.push_back({rasterize_box(random_box(rng, frame), frame.width, frame.height), rng.uniform(0.5, 0.95),
                       origin});
      }
    }
    return out;
  }

  EmbeddingVector embed_audio(const FramePair& frame) const override { return EmbeddingVector(audio_direction(frame)); }

  /// The crop's cosine with the audio embedding tracks its overlap with the
  /// sounding objects, plus noise.
  EmbeddingVector embed_image(const FramePair& frame, const BoundingBox& crop) const override {
    const auto objects = scene(frame);
    double overlap = 0.0;
    for (const auto& o : objects)
      if (o.sounding) overlap = std::max(overlap, box_iou(o.box, crop));
    SplitMix64 rng = stream(frame.frame_id, crop_qualifier(crop));
    const double target = std::clamp(-0.3 + 1.3 * overlap + rng.uniform(-0.1, 0.1), -1.0, 1.0);

    const auto u = audio_direction(frame);
    std::vector<double> w(embedding_dim_);
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);
    double proj = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) proj += w[i] * u[i];
    double norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= proj * u[i];
      norm += w[i] * w[i];
    }
    norm = std::sqrt(norm);
    const double ortho = std::sqrt(std::max(0.0, 1.0 - target * target));
    std::vector<double> out(embedding_dim_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = target * u[i] + (norm > 0 ? ortho * w[i] / norm : 0.0);
    return EmbeddingVector(std::move(out));
  }

 private:
  struct LabelEntry {
    const char* label;
    int class_index;
  };
  // Mock vocabulary; indices are positions in this table, not an ontology.
  static constexpr std::array<LabelEntry, 8> kLabels{{{"speech", 0},
                                                      {"dog", 1},
                                                      {"piano", 2},
                                                      {"guitar", 3},
                                                      {"car", 4},
                                                      {"bird", 5},
                                                      {"baby cry", 6},
                                                      {"lawn mower", 7}}};

  SplitMix64 stream(const std::string& frame_id, const std::string& what) const {
    const std::uint64_t base = fnv1a64(std::to_string(seed_));
    return SplitMix64(fnv1a64(frame_id + "|" + what, base));
  }

  std::vector<double> audio_direction(const FramePair& frame) const {
    SplitMix64 rng = stream(frame.frame_id, "audio");
    std::vector<double> u(embedding_dim_);
    double norm = 0.0;
    for (auto& v : u) {
      v = rng.uniform(-1.0, 1.0);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) u[0] = norm = 1.0;
    for (auto& v : u) v /= norm;
    return u;
  }

  static BoundingBox shrink(const BoundingBox& b, double fraction) {
    const double dx = std::floor(b.width() * fraction / 2);
    const double dy = std::floor(b.height() * fraction / 2);
    BoundingBox s{b.x_min + dx, b.y_min + dy, b.x_max - dx, b.y_max - dy};
    return s.is_valid() ? s : b;
  }

  static BoundingBox jitter(const BoundingBox& b, SplitMix64& rng, const FramePair& frame) {
    const auto j = [&rng] { return std::floor(rng.uniform(-4.0, 4.0)); };
    BoundingBox out{std::max(0.0, b.x_min + j()), std::max(0.0, b.y_min + j()),
                    std::min<double>(frame.width, b.x_max + j()), std::min<double>(frame.height, b.y_max + j())};
    return out.is_valid() ? out : b;
  }

  static BoundingBox random_box(SplitMix64& rng, const FramePair& frame) {
    const double w = std::floor(rng.uniform(0.1, 0.4) * frame.width) + 1;
    const double h = std::floor(rng.uniform(0.1, 0.4) * frame.height) + 1;
    const double x = std::floor(rng.uniform(0.0, frame.width - w));
    const double y = std::floor(rng.uniform(0.0, frame.height - h));
    return {x, y, x + w, y + h};
  }

  std::uint64_t seed_;
  std::size_t embedding_dim_;
};

}  // namespace cmsf

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

// Interfaces for the foundation-model capabilities the pipelines consume,
// and the in-memory recorded backend that replays an interchange bundle.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "cmsf/embedding.hpp"
#include "cmsf/error.hpp"
#include "cmsf/geometry.hpp"
#include "cmsf/hash.hpp"

namespace cmsf {

inline constexpr int kFrameSize = 224;
inline constexpr int kAudioClassCount = 521;

/// One image frame and its aligned one-second audio segment.
struct FramePair {
  std::string frame_id;  // "<video_id>/<t>"
  int width = kFrameSize;
  int height = kFrameSize;
  std::filesystem::path image_path;
  std::filesystem::path audio_path;
  int t = 1;
};

struct AudioTag {
  std::string label;
  int class_index = 0;
  double probability = 0.0;

  bool is_valid() const {
    return class_index >= 0 && class_index < kAudioClassCount && probability >= 0.0 && probability <= 1.0;
  }
  friend bool operator==(const AudioTag&, const AudioTag&) = default;
};

struct MaskCandidate {
  BinaryMask mask;
  double quality = 0.0;
  std::string prompt_origin;

  friend bool operator==(const MaskCandidate&, const MaskCandidate&) = default;
};

struct PointPrompt {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PointPrompt&, const PointPrompt&) = default;
};

using BoxPrompts = std::vector<BoundingBox>;
using PointPrompts = std::vector<PointPrompt>;
using PromptSet = std::variant<BoxPrompts, PointPrompts>;

enum class Capability { AudioTags, GroundedBoxes, Proposals, MaskCandidates, ImageEmbedding, AudioEmbedding };

inline const char* to_string(Capability c) {
  switch (c) {
    case Capability::AudioTags: return "audio_tags";
    case Capability::GroundedBoxes: return "grounded_boxes";
    case Capability::Proposals: return "proposals";
    case Capability::MaskCandidates: return "mask_candidates";
    case Capability::ImageEmbedding: return "image_embedding";
    case Capability::AudioEmbedding: return "audio_embedding";
  }
  return "?";
}

inline std::optional<Capability> capability_from_string(const std::string& s) {
  for (auto c : {Capability::AudioTags, Capability::GroundedBoxes, Capability::Proposals,
                 Capability::MaskCandidates, Capability::ImageEmbedding, Capability::AudioEmbedding}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

/// (frame_id, capability, qualifier) identifies one record.
struct RecordKey {
  std::string frame_id;
  Capability capability = Capability::AudioTags;
  std::string qualifier;  // empty when the capability takes no argument

  std::string str() const {
    std::string s = frame_id + "/" + to_string(capability);
    if (!qualifier.empty()) s += "[" + qualifier + "]";
    return s;
  }

  friend auto operator<=>(const RecordKey& a, const RecordKey& b) {
    return std::tie(a.frame_id, a.capability, a.qualifier) <=> std::tie(b.frame_id, b.capability, b.qualifier);
  }
  friend bool operator==(const RecordKey&, const RecordKey&) = default;
};

// Canonical qualifiers. Boxes are keyed by their integer-rounded corners so
// that crops and prompts computed by different pipelines resolve to the
// same record.

inline std::string rounded_box_text(const BoundingBox& b) {
  return std::to_string(std::lround(b.x_min)) + "," + std::to_string(std::lround(b.y_min)) + "," +
         std::to_string(std::lround(b.x_max)) + "," + std::to_string(std::lround(b.y_max));
}

inline std::string box_prompt_qualifier(const BoundingBox& b) { return "box:" + rounded_box_text(b); }
inline std::string crop_qualifier(const BoundingBox& b) { return "crop:" + rounded_box_text(b); }

/// Point sets are keyed as a whole: "points:<count>:<fnv1a64 of the coordinates>".
inline std::string point_prompt_qualifier(const PointPrompts& points) {
  std::string canon;
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f;", p.x, p.y);
    canon += buf;
  }
  return "points:" + std::to_string(points.size()) + ":" + hex64(fnv1a64(canon));
}

/// The five model capabilities. Implementations must be safe to call
/// concurrently and return results independent of call order.
class Backend {
 public:
  virtual ~Backend() = default;

  /// Tags sorted by descending probability.
  virtual std::vector<AudioTag> tag_audio(const FramePair& frame) const = 0;
  virtual std::vector<ScoredBox> detect_grounded(const FramePair& frame,
                                                 const std::vector<std::string>& phrases) const = 0;
  /// Class-agnostic proposals; score carries objectness.
  virtual std::vector<ScoredBox> propose_class_agnostic(const FramePair& frame) const = 0;
  virtual std::vector<MaskCandidate> segment(const FramePair& frame, const PromptSet& prompts) const = 0;
  virtual EmbeddingVector embed_image(const FramePair& frame, const BoundingBox& crop) const = 0;
  virtual EmbeddingVector embed_audio(const FramePair& frame) const = 0;
};

using RecordValue =
    std::variant<std::vector<AudioTag>, std::vector<ScoredBox>, std::vector<MaskCandidate>, EmbeddingVector>;

struct FrameDims {
  int width = kFrameSize;
  int height = kFrameSize;
  friend bool operator==(const FrameDims&, const FrameDims&) = default;
};

/// Key-value replay of recorded model outputs. Read-only once populated.
class RecordedBackend final : public Backend {
 public:
  RecordedBackend() = default;
  explicit RecordedBackend(std::size_t embedding_dim) : embedding_dim_(embedding_dim) {}

  std::size_t embedding_dim() const { return embedding_dim_; }
  const std::map<RecordKey, RecordValue>& records() const { return records_; }
  const std::map<std::string, FrameDims>& frames() const { return frames_; }

  void add_frame(const std::string& frame_id, FrameDims dims) { frames_[frame_id] = dims; }

  /// Inserts one record after checking it against the bundle invariants.
  void put(const RecordKey& key, RecordValue value) {
    auto frame = frames_.find(key.frame_id);
    if (frame == frames_.end()) throw CorruptBundleError("record for undeclared frame: " + key.str());
    check_value(key, value, frame->second);
    if (!records_.emplace(key, std::move(value)).second) throw CorruptBundleError("duplicate record: " + key.str());
  }

  std::vector<AudioTag> tag_audio(const FramePair& frame) const override {
    auto tags = get<std::vector<AudioTag>>({frame.frame_id, Capability::AudioTags, {}});
    std::stable_sort(tags.begin(), tags.end(),
                     [](const AudioTag& a, const AudioTag& b) { return a.probability > b.probability; });
    return tags;
  }

  std::vector<ScoredBox> detect_grounded(const FramePair& frame,
                                         const std::vector<std::string>& phrases) const override {
    if (phrases.empty()) throw InvalidArgument("detect_grounded needs at least one phrase");
    std::vector<ScoredBox> out;
    for (const auto& phrase : phrases) {
      auto boxes = get<std::vector<ScoredBox>>({frame.frame_id, Capability::GroundedBoxes, phrase});
      out.insert(out.end(), boxes.begin(), boxes.end());
    }
    return out;
  }

  std::vector<ScoredBox> propose_class_agnostic(const FramePair& frame) const override {
    return get<std::vector<ScoredBox>>({frame.frame_id, Capability::Proposals, {}});
  }

  /// Box prompts resolve one record per box; a point set is one record.
  std::vector<MaskCandidate> segment(const FramePair& frame, const PromptSet& prompts) const override {
    std::vector<MaskCandidate> out;
    if (const auto* boxes = std::get_if<BoxPrompts>(&prompts)) {
      if (boxes->empty()) throw InvalidArgument("segment needs at least one prompt");
      for (const auto& b : *boxes) {
        auto c = get<std::vector<MaskCandidate>>({frame.frame_id, Capability::MaskCandidates, box_prompt_qualifier(b)});
        out.insert(out.end(), c.begin(), c.end());
      }
    } else {
      const auto& points = std::get<PointPrompts>(prompts);
      if (points.empty()) throw InvalidArgument("segment needs at least one prompt");
      out = get<std::vector<MaskCandidate>>(
          {frame.frame_id, Capability::MaskCandidates, point_prompt_qualifier(points)});
    }
    return out;
  }

  EmbeddingVector embed_image(const FramePair& frame, const BoundingBox& crop) const override {
    return get<EmbeddingVector>({frame.frame_id, Capability::ImageEmbedding, crop_qualifier(crop)});
  }

  EmbeddingVector embed_audio(const FramePair& frame) const override {
    return get<EmbeddingVector>({frame.frame_id, Capability::AudioEmbedding, {}});
  }

 private:
  template <typename T>
  const T& get(const RecordKey& key) const {
    auto it = records_.find(key);
    if (it == records_.end()) throw MissingRecordError(key.str());
    const T* v = std::get_if<T>(&it->second);
    if (v == nullptr) throw CorruptBundleError("record has wrong type: " + key.str());
    return *v;
  }

  void check_value(const RecordKey& key, const RecordValue& value, FrameDims dims) {
    const bool type_ok = std::visit(
        [&](const auto& v) {
          using V = std::decay_t<decltype(v)>;
          switch (key.capability) {
            case Capability::AudioTags: return std::is_same_v<V, std::vector<AudioTag>>;
            case Capability::GroundedBoxes:
            case Capability::Proposals: return std::is_same_v<V, std::vector<ScoredBox>>;
            case Capability::MaskCandidates: return std::is_same_v<V, std::vector<MaskCandidate>>;
            case Capability::ImageEmbedding:
            case Capability::AudioEmbedding: return std::is_same_v<V, EmbeddingVector>;
          }
          return false;
        },
        value);
    if (!type_ok) throw CorruptBundleError("record value does not match capability: " + key.str());

    if (const auto* tags = std::get_if<std::vector<AudioTag>>(&value)) {
      for (const auto& t : *tags)
        if (!t.is_valid()) throw CorruptBundleError("audio tag out of range in " + key.str());
    } else if (const auto* boxes = std::get_if<std::vector<ScoredBox>>(&value)) {
      for (const auto& b : *boxes)
        if (!b.box.is_valid() || !(b.score >= 0.0 && b.score <= 1.0))
          throw CorruptBundleError("invalid scored box in " + key.str());
    } else if (const auto* cands = std::get_if<std::vector<MaskCandidate>>(&value)) {
      for (const auto& c : *cands) {
        if (c.mask.width() != dims.width || c.mask.height() != dims.height)
          throw CorruptBundleError("mask dimensions differ from frame in " + key.str());
        if (!(c.quality >= 0.0 && c.quality <= 1.0)) throw CorruptBundleError("quality out of range in " + key.str());
      }
    } else {
      const auto& e = std::get<EmbeddingVector>(value);
      if (embedding_dim_ == 0) embedding_dim_ = e.dim();
      if (e.dim() != embedding_dim_) {
        throw CorruptBundleError("embedding dim " + std::to_string(e.dim()) + " differs from bundle dim " +
                                 std::to_string(embedding_dim_) + " in " + key.str());
      }
    }
  }

  std::size_t embedding_dim_ = 0;
  std::map<std::string, FrameDims> frames_;
  std::map<RecordKey, RecordValue> records_;
};

}  // namespace cmsf

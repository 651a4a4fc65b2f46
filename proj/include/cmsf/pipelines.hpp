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

// The three cross-modality filtering pipelines. Each maps one frame and a
// backend to one binary mask: proposals come from one modality, the other
// modality filters them, and the survivors are unioned.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmsf/backend.hpp"
#include "cmsf/embedding.hpp"
#include "cmsf/error.hpp"
#include "cmsf/geometry.hpp"

namespace cmsf {

enum class Variant { AtGdinoSam, OwodBind, SamBind };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::AtGdinoSam: return "at-gdino-sam";
    case Variant::OwodBind: return "owod-bind";
    case Variant::SamBind: return "sam-bind";
  }
  return "?";
}

/// Row label used in reports.
inline const char* display_name(Variant v) {
  switch (v) {
    case Variant::AtGdinoSam: return "AT-GDINO-SAM";
    case Variant::OwodBind: return "OWOD-BIND";
    case Variant::SamBind: return "SAM-BIND";
  }
  return "?";
}

inline std::optional<Variant> variant_from_string(const std::string& s) {
  for (auto v : {Variant::AtGdinoSam, Variant::OwodBind, Variant::SamBind})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

enum class OwodMaskMode { RasterizeBoxes, SegmentBoxes };

struct PipelineConfig {
  double tau_at = 0.5;
  double tau_bb = 0.5;
  double tau_bind = 0.7;
  double nms_iou = 0.5;
  double quality_floor = 0.88;
  int grid_size = 16;
  OwodMaskMode owod_mask_mode = OwodMaskMode::RasterizeBoxes;

  void validate() const {
    auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    if (!in(tau_at, 0, 1)) throw ConfigError("tau_at must be in [0,1]");
    if (!in(tau_bb, 0, 1)) throw ConfigError("tau_bb must be in [0,1]");
    if (!in(tau_bind, -1, 1)) throw ConfigError("tau_bind must be in [-1,1]");
    if (!in(nms_iou, 0, 1)) throw ConfigError("nms_iou must be in [0,1]");
    if (!in(quality_floor, 0, 1)) throw ConfigError("quality_floor must be in [0,1]");
    if (grid_size < 1) throw ConfigError("grid_size must be positive");
  }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

inline const char* to_string(OwodMaskMode m) {
  return m == OwodMaskMode::RasterizeBoxes ? "rasterize_boxes" : "segment_boxes";
}

inline nlohmann::json config_to_json(const PipelineConfig& c) {
  return {{"tau_at", c.tau_at},
          {"tau_bb", c.tau_bb},
          {"tau_bind", c.tau_bind},
          {"nms_iou", c.nms_iou},
          {"quality_floor", c.quality_floor},
          {"grid_size", c.grid_size},
          {"owod_mask_mode", to_string(c.owod_mask_mode)}};
}

/// Starts from the defaults and applies the fields present in `j`; unknown
/// fields are rejected.
inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "tau_at") base.tau_at = value.get<double>();
      else if (key == "tau_bb") base.tau_bb = value.get<double>();
      else if (key == "tau_bind") base.tau_bind = value.get<double>();
      else if (key == "nms_iou") base.nms_iou = value.get<double>();
      else if (key == "quality_floor") base.quality_floor = value.get<double>();
      else if (key == "grid_size") base.grid_size = value.get<int>();
      else if (key == "owod_mask_mode") {
        const auto mode = value.get<std::string>();
        if (mode == "rasterize_boxes") base.owod_mask_mode = OwodMaskMode::RasterizeBoxes;
        else if (mode == "segment_boxes") base.owod_mask_mode = OwodMaskMode::SegmentBoxes;
        else throw ConfigError("unknown owod_mask_mode: " + mode);
      } else {
        throw ConfigError("unknown config field: " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  base.validate();
  return base;
}

/// Count of items entering and leaving one stage. For filter stages
/// out <= in always holds.
struct StageCount {
  std::string stage;
  std::size_t in = 0;
  std::size_t out = 0;
  bool filter = true;

  friend bool operator==(const StageCount&, const StageCount&) = default;
};

using StageTrace = std::vector<StageCount>;

inline nlohmann::json trace_to_json(const StageTrace& trace) {
  auto arr = nlohmann::json::array();
  for (const auto& s : trace) arr.push_back({{"stage", s.stage}, {"in", s.in}, {"out", s.out}, {"filter", s.filter}});
  return arr;
}

struct PipelineResult {
  BinaryMask mask;
  StageTrace trace;
};

namespace detail {

template <typename F>
auto run_stage(const char* stage, const FramePair& frame, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, frame.frame_id, e.what());
  }
}

inline std::vector<BinaryMask> quality_filtered(const std::vector<MaskCandidate>& candidates, double floor) {
  std::vector<BinaryMask> out;
  for (const auto& c : candidates)
    if (c.quality > floor) out.push_back(c.mask);
  return out;
}

}  // namespace detail

/// Regular grid of point prompts at cell centres.
inline PointPrompts grid_points(int grid_size, int width, int height) {
  PointPrompts points;
  points.reserve(static_cast<std::size_t>(grid_size) * grid_size);
  for (int r = 0; r < grid_size; ++r) {
    for (int c = 0; c < grid_size; ++c) {
      points.push_back({(c + 0.5) * width / grid_size, (r + 0.5) * height / grid_size});
    }
  }
  return points;
}

/// Audio tags -> grounded boxes -> box-prompted masks.
inline PipelineResult run_at_gdino_sam(const FramePair& frame, const PipelineConfig& cfg, const Backend& backend) {
  cfg.validate();
  PipelineResult result;
  const auto empty = [&] { return BinaryMask(frame.width, frame.height); };

  const auto tags = detail::run_stage("tag_audio", frame, [&] { return backend.tag_audio(frame); });
  std::vector<std::string> kept_labels;
  for (const auto& t : tags)
    if (t.probability > cfg.tau_at) kept_labels.push_back(t.label);
  result.trace.push_back({"tag_filter", tags.size(), kept_labels.size()});
  if (kept_labels.empty()) {
    result.mask = empty();
    return result;
  }

  BoxPrompts boxes;
  for (const auto& label : kept_labels) {
    const auto found = detail::run_stage("detect_grounded", frame, [&] {
      return backend.detect_grounded(frame, {label});
    });
    for (const auto& b : found) boxes.push_back(b.box);
  }
  result.trace.push_back({"grounding", kept_labels.size(), boxes.size(), false});
  if (boxes.empty()) {
    result.mask = empty();
    return result;
  }

  const auto candidates = detail::run_stage("segment", frame, [&] { return backend.segment(frame, boxes); });
  const auto kept = detail::quality_filtered(candidates, cfg.quality_floor);
  result.trace.push_back({"quality_filter", candidates.size(), kept.size()});
  result.mask = mask_union(kept, frame.width, frame.height);
  return result;
}

/// Class-agnostic proposals filtered by objectness, then by audio-crop
/// cosine similarity.
inline PipelineResult run_owod_bind(const FramePair& frame, const PipelineConfig& cfg, const Backend& backend) {
  cfg.validate();
  PipelineResult result;

  const auto proposals =
      detail::run_stage("propose_class_agnostic", frame, [&] { return backend.propose_class_agnostic(frame); });
  BoxPrompts objects;
  for (const auto& p : proposals)
    if (p.score > cfg.tau_bb) objects.push_back(p.box);
  result.trace.push_back({"objectness_filter", proposals.size(), objects.size()});
  if (objects.empty()) {
    result.mask = BinaryMask(frame.width, frame.height);
    return result;
  }

  const auto audio = detail::run_stage("embed_audio", frame, [&] { return backend.embed_audio(frame); });
  std::vector<EmbeddingVector> crops;
  crops.reserve(objects.size());
  for (const auto& b : objects)
    crops.push_back(detail::run_stage("embed_image", frame, [&] { return backend.embed_image(frame, b); }));
  const auto ranked = detail::run_stage("bind_similarity", frame, [&] { return rank_by_similarity(audio, crops); });
  auto bound = threshold_filter(ranked, cfg.tau_bind);
  // Back to proposal order so downstream prompt order is stable.
  std::sort(bound.begin(), bound.end(), [](const auto& a, const auto& b) { return a.proposal_index < b.proposal_index; });
  result.trace.push_back({"bind_filter", objects.size(), bound.size()});

  BoxPrompts survivors;
  for (const auto& s : bound) survivors.push_back(objects[s.proposal_index]);

  if (cfg.owod_mask_mode == OwodMaskMode::RasterizeBoxes || survivors.empty()) {
    std::vector<BinaryMask> masks;
    for (const auto& b : survivors) masks.push_back(rasterize_box(b, frame.width, frame.height));
    result.mask = mask_union(masks, frame.width, frame.height);
    return result;
  }

  const auto candidates = detail::run_stage("segment", frame, [&] { return backend.segment(frame, survivors); });
  const auto kept = detail::quality_filtered(candidates, cfg.quality_floor);
  result.trace.push_back({"quality_filter", candidates.size(), kept.size()});
  result.mask = mask_union(kept, frame.width, frame.height);
  return result;
}

/// Grid-prompted masks, deduplicated with NMS, filtered by audio-crop
/// cosine similarity.
inline PipelineResult run_sam_bind(const FramePair& frame, const PipelineConfig& cfg, const Backend& backend) {
  cfg.validate();
  PipelineResult result;
  const auto empty = [&] { return BinaryMask(frame.width, frame.height); };

  const PromptSet points = grid_points(cfg.grid_size, frame.width, frame.height);
  const auto candidates = detail::run_stage("segment", frame, [&] { return backend.segment(frame, points); });

  std::vector<const MaskCandidate*> good;
  std::vector<ScoredBox> boxes;
  for (const auto& c : candidates) {
    if (!(c.quality > cfg.quality_floor)) continue;
    auto box = tight_bbox(c.mask);
    if (!box) continue;
    good.push_back(&c);
    boxes.push_back({*box, c.quality});
  }
  result.trace.push_back({"quality_filter", candidates.size(), good.size()});
  if (good.empty()) {
    result.mask = empty();
    return result;
  }

  const auto kept = nms_indices(boxes, cfg.nms_iou);
  result.trace.push_back({"nms", good.size(), kept.size()});

  const auto audio = detail::run_stage("embed_audio", frame, [&] { return backend.embed_audio(frame); });
  std::vector<BinaryMask> survivors;
  for (std::size_t i : kept) {
    const auto crop =
        detail::run_stage("embed_image", frame, [&] { return backend.embed_image(frame, boxes[i].box); });
    const double sim = detail::run_stage("bind_similarity", frame, [&] { return cosine_similarity(crop, audio); });
    if (sim > cfg.tau_bind) survivors.push_back(good[i]->mask);
  }
  result.trace.push_back({"bind_filter", kept.size(), survivors.size()});
  result.mask = mask_union(survivors, frame.width, frame.height);
  return result;
}

inline PipelineResult run_variant(Variant v, const FramePair& frame, const PipelineConfig& cfg, const Backend& backend) {
  switch (v) {
    case Variant::AtGdinoSam: return run_at_gdino_sam(frame, cfg, backend);
    case Variant::OwodBind: return run_owod_bind(frame, cfg, backend);
    case Variant::SamBind: return run_sam_bind(frame, cfg, backend);
  }
  throw InvalidArgument("unknown variant");
}

/// Raised by run_sequence when one or more frames fail.
class SequenceError : public Error {
 public:
  explicit SequenceError(std::vector<StageError> failures)
      : Error(summarize(failures)), failures_(std::move(failures)) {}
  const std::vector<StageError>& failures() const { return failures_; }

 private:
  static std::string summarize(const std::vector<StageError>& failures) {
    std::string s = std::to_string(failures.size()) + " frame(s) failed:";
    for (const auto& f : failures) s += "\n  [" + f.frame_id() + "] " + f.what();
    return s;
  }
  std::vector<StageError> failures_;
};

/// Runs `variant` on every frame. Frames are independent, so `workers`
/// only affects wall time; results are returned in input order.
inline std::vector<PipelineResult> run_sequence(const std::vector<FramePair>& frames, const PipelineConfig& cfg,
                                                const Backend& backend, Variant variant, unsigned workers = 1) {
  cfg.validate();
  std::vector<std::optional<PipelineResult>> slots(frames.size());
  std::vector<std::optional<StageError>> errors(frames.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < frames.size(); i = next++) {
      try {
        slots[i] = run_variant(variant, frames[i], cfg, backend);
      } catch (const StageError& e) {
        errors[i] = e;
      } catch (const std::exception& e) {
        errors[i] = StageError("pipeline", frames[i].frame_id, e.what());
      }
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(frames.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<StageError> failures;
  for (auto& e : errors)
    if (e) failures.push_back(*e);
  if (!failures.empty()) throw SequenceError(std::move(failures));

  std::vector<PipelineResult> out;
  out.reserve(frames.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace cmsf

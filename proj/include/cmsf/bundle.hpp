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

// On-disk interchange bundle: <bundle>/manifest.json plus one JSON file per
// record and PNG files for masks.
//
// manifest.json:
//   {"format": "cmsf-bundle", "version": 1, "embedding_dim": D,
//    "frames": [{"frame_id": "<video>/<t>", "width": 224, "height": 224,
//                "records": [{"capability": "...", "qualifier": "...", "path": "..."}]}]}
//
// Record files:
//   audio_tags                 [{"label", "class_index", "probability"}]
//   grounded_boxes, proposals  [{"box": [x_min, y_min, x_max, y_max], "score"}]
//   mask_candidates            [{"mask": "<png path>", "quality", "prompt"}]
//   *_embedding                {"dim", "values"}

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmsf/backend.hpp"
#include "cmsf/embedding.hpp"
#include "cmsf/error.hpp"
#include "cmsf/hash.hpp"
#include "cmsf/mask_io.hpp"

namespace cmsf {

inline constexpr int kBundleVersion = 1;
inline constexpr const char* kBundleFormat = "cmsf-bundle";

namespace detail {

inline std::filesystem::path resolve_in_bundle(const std::filesystem::path& root, const std::string& rel) {
  const std::filesystem::path p(rel);
  if (p.is_absolute() || rel.empty()) throw CorruptBundleError("record path must be relative: '" + rel + "'");
  for (const auto& part : p)
    if (part == "..") throw CorruptBundleError("record path escapes bundle: " + rel);
  return root / p;
}

inline RecordValue parse_record(const std::filesystem::path& root, Capability cap, const nlohmann::json& j,
                                std::map<std::string, BinaryMask>& mask_cache) {
  switch (cap) {
    case Capability::AudioTags: {
      std::vector<AudioTag> tags;
      for (const auto& t : j)
        tags.push_back({t.at("label").get<std::string>(), t.at("class_index").get<int>(),
                        t.at("probability").get<double>()});
      return tags;
    }
    case Capability::GroundedBoxes:
    case Capability::Proposals: {
      std::vector<ScoredBox> boxes;
      for (const auto& b : j) {
        const auto c = b.at("box").get<std::vector<double>>();
        if (c.size() != 4) throw CorruptBundleError("box must have 4 coordinates");
        boxes.push_back({{c[0], c[1], c[2], c[3]}, b.at("score").get<double>()});
      }
      return boxes;
    }
    case Capability::MaskCandidates: {
      std::vector<MaskCandidate> cands;
      for (const auto& c : j) {
        const auto rel = c.at("mask").get<std::string>();
        auto it = mask_cache.find(rel);
        if (it == mask_cache.end()) {
          BinaryMask m;
          try {
            m = read_mask_png(resolve_in_bundle(root, rel));
          } catch (const LoadError& e) {
            throw CorruptBundleError(e.what());
          }
          it = mask_cache.emplace(rel, std::move(m)).first;
        }
        cands.push_back({it->second, c.at("quality").get<double>(), c.value("prompt", std::string{})});
      }
      return cands;
    }
    case Capability::ImageEmbedding:
    case Capability::AudioEmbedding: return embedding_from_json(j);
  }
  throw CorruptBundleError("unknown capability");
}

inline nlohmann::json boxes_to_json(const std::vector<ScoredBox>& boxes) {
  auto arr = nlohmann::json::array();
  for (const auto& b : boxes)
    arr.push_back({{"box", {b.box.x_min, b.box.y_min, b.box.x_max, b.box.y_max}}, {"score", b.score}});
  return arr;
}

}  // namespace detail

/// Loads and validates a bundle. Every referenced file must exist and parse,
/// masks must match their frame's dimensions and all embeddings must share
/// the declared dim; any violation raises CorruptBundleError.
inline RecordedBackend load_bundle(const std::filesystem::path& bundle) {
  const auto manifest_path = bundle / "manifest.json";
  nlohmann::json manifest;
  try {
    manifest = detail::read_json_file(manifest_path);
  } catch (const LoadError& e) {
    throw CorruptBundleError(e.what());
  }

  try {
    if (manifest.value("format", std::string{}) != kBundleFormat)
      throw CorruptBundleError("not a bundle manifest: " + manifest_path.string());
    const int version = manifest.at("version").get<int>();
    if (version != kBundleVersion) throw CorruptBundleError("unsupported bundle version " + std::to_string(version));
    if (manifest.value("incomplete", false)) throw CorruptBundleError("bundle is marked incomplete");
    const auto dim = manifest.at("embedding_dim").get<std::size_t>();
    if (dim == 0) throw CorruptBundleError("embedding_dim must be positive");

    RecordedBackend backend(dim);
    std::map<std::string, BinaryMask> mask_cache;
    for (const auto& frame : manifest.at("frames")) {
      const auto frame_id = frame.at("frame_id").get<std::string>();
      const FrameDims dims{frame.value("width", kFrameSize), frame.value("height", kFrameSize)};
      if (dims.width <= 0 || dims.height <= 0) throw CorruptBundleError("bad dimensions for frame " + frame_id);
      if (backend.frames().count(frame_id)) throw CorruptBundleError("duplicate frame " + frame_id);
      backend.add_frame(frame_id, dims);
      for (const auto& rec : frame.at("records")) {
        const auto cap_name = rec.at("capability").get<std::string>();
        const auto cap = capability_from_string(cap_name);
        if (!cap) throw CorruptBundleError("unknown capability '" + cap_name + "' in frame " + frame_id);
        RecordKey key{frame_id, *cap, rec.value("qualifier", std::string{})};
        const auto path = detail::resolve_in_bundle(bundle, rec.at("path").get<std::string>());
        nlohmann::json body;
        try {
          body = detail::read_json_file(path);
        } catch (const LoadError& e) {
          throw CorruptBundleError(key.str() + ": " + e.what());
        }
        RecordValue value;
        try {
          value = detail::parse_record(bundle, *cap, body, mask_cache);
        } catch (const CorruptBundleError&) {
          throw;
        } catch (const Error& e) {
          throw CorruptBundleError(key.str() + ": " + e.what());
        }
        backend.put(key, std::move(value));
      }
    }
    return backend;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptBundleError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
}

/// Writes `backend` in canonical form: records in key order, record files
/// named "<frame_id>/<NNN>_<capability>.json", masks stored once per
/// distinct content under "<frame_id>/masks/".
inline void write_bundle(const RecordedBackend& backend, const std::filesystem::path& bundle) {
  namespace fs = std::filesystem;
  fs::create_directories(bundle);

  nlohmann::json frames = nlohmann::json::array();
  for (const auto& [frame_id, dims] : backend.frames()) {
    nlohmann::json records = nlohmann::json::array();
    std::map<std::string, const BinaryMask*> written_masks;
    int n = 0;
    auto lo = backend.records().lower_bound(RecordKey{frame_id, Capability::AudioTags, {}});
    for (auto it = lo; it != backend.records().end() && it->first.frame_id == frame_id; ++it, ++n) {
      const auto& [key, value] = *it;
      char name[64];
      std::snprintf(name, sizeof(name), "%03d_%s.json", n, to_string(key.capability));
      const std::string rel = frame_id + "/" + name;

      nlohmann::json body;
      if (const auto* tags = std::get_if<std::vector<AudioTag>>(&value)) {
        body = nlohmann::json::array();
        for (const auto& t : *tags)
          body.push_back({{"label", t.label}, {"class_index", t.class_index}, {"probability", t.probability}});
      } else if (const auto* boxes = std::get_if<std::vector<ScoredBox>>(&value)) {
        body = detail::boxes_to_json(*boxes);
      } else if (const auto* cands = std::get_if<std::vector<MaskCandidate>>(&value)) {
        body = nlohmann::json::array();
        for (const auto& c : *cands) {
          const auto runs = c.mask.runs();
          const std::string digest = hex64(fnv1a64(
              std::string_view(reinterpret_cast<const char*>(runs.data()), runs.size() * sizeof(std::uint32_t))));
          std::string mask_rel;
          for (int suffix = 0;; ++suffix) {
            mask_rel = frame_id + "/masks/" + digest + (suffix ? "_" + std::to_string(suffix) : "") + ".png";
            auto found = written_masks.find(mask_rel);
            if (found == written_masks.end()) {
              write_mask_png(bundle / mask_rel, c.mask);
              written_masks.emplace(mask_rel, &c.mask);
              break;
            }
            if (*found->second == c.mask) break;
          }
          body.push_back({{"mask", mask_rel}, {"quality", c.quality}, {"prompt", c.prompt_origin}});
        }
      } else {
        body = embedding_to_json(std::get<EmbeddingVector>(value));
      }
      detail::write_json_file(bundle / rel, body);

      nlohmann::json entry{{"capability", to_string(key.capability)}, {"path", rel}};
      if (!key.qualifier.empty()) entry["qualifier"] = key.qualifier;
      records.push_back(std::move(entry));
    }
    frames.push_back({{"frame_id", frame_id}, {"width", dims.width}, {"height", dims.height}, {"records", records}});
  }

  nlohmann::json manifest{{"format", kBundleFormat},
                          {"version", kBundleVersion},
                          {"embedding_dim", backend.embedding_dim()},
                          {"frames", frames}};
  detail::write_json_file(bundle / "manifest.json", manifest);
}

/// FNV-1a over every file in the bundle (relative path and bytes) in
/// sorted path order.
inline std::string bundle_hash(const std::filesystem::path& bundle) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(bundle))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), bundle));
  std::sort(files.begin(), files.end());
  std::uint64_t h = kFnvOffset;
  for (const auto& rel : files) {
    h = fnv1a64(rel.generic_string(), h);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(detail::read_text_file(bundle / rel), h);
  }
  return "fnv1a64:" + hex64(h);
}

}  // namespace cmsf

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

// Synthetic mini-dataset and matching interchange bundle, generated from a
// seed through MockBackend. Used by the acceptance suite and `cmsf make-fixtures`.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "cmsf/backend.hpp"
#include "cmsf/bundle.hpp"
#include "cmsf/dataset.hpp"
#include "cmsf/mask_io.hpp"
#include "cmsf/mock_backend.hpp"
#include "cmsf/pipelines.hpp"

namespace cmsf {

/// Queries `source` exhaustively for one frame and stores the answers in
/// `sink`, so that every pipeline can be replayed at any threshold setting
/// for the given grid size.
inline void record_frame(const Backend& source, const FramePair& frame, RecordedBackend& sink, int grid_size) {
  sink.add_frame(frame.frame_id, {frame.width, frame.height});
  auto put_once = [&](const RecordKey& key, auto&& make) {
    if (!sink.records().count(key)) sink.put(key, make());
  };

  const auto tags = source.tag_audio(frame);
  sink.put({frame.frame_id, Capability::AudioTags, {}}, tags);

  std::vector<BoundingBox> boxes;
  for (const auto& t : tags) {
    auto grounded = source.detect_grounded(frame, {t.label});
    for (const auto& b : grounded) boxes.push_back(b.box);
    put_once(RecordKey{frame.frame_id, Capability::GroundedBoxes, t.label}, [&] { return grounded; });
  }
  const auto proposals = source.propose_class_agnostic(frame);
  sink.put({frame.frame_id, Capability::Proposals, {}}, proposals);
  for (const auto& p : proposals) boxes.push_back(p.box);

  for (const auto& b : boxes) {
    put_once(RecordKey{frame.frame_id, Capability::MaskCandidates, box_prompt_qualifier(b)},
             [&] { return source.segment(frame, BoxPrompts{b}); });
  }

  const auto points = grid_points(grid_size, frame.width, frame.height);
  const auto grid_candidates = source.segment(frame, points);
  sink.put({frame.frame_id, Capability::MaskCandidates, point_prompt_qualifier(points)}, grid_candidates);

  sink.put({frame.frame_id, Capability::AudioEmbedding, {}}, source.embed_audio(frame));
  std::vector<BoundingBox> crops;
  for (const auto& p : proposals) crops.push_back(p.box);
  for (const auto& c : grid_candidates)
    if (auto b = tight_bbox(c.mask)) crops.push_back(*b);
  for (const auto& b : crops) {
    put_once(RecordKey{frame.frame_id, Capability::ImageEmbedding, crop_qualifier(b)},
             [&] { return source.embed_image(frame, b); });
  }
}

struct FixtureLayout {
  std::filesystem::path dataset;
  std::filesystem::path bundle;
};

namespace detail {

inline void write_wav_tone(const std::filesystem::path& path, double frequency) {
  constexpr std::uint32_t kRate = 8000;
  std::vector<std::int16_t> samples(kRate);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double phase = 2.0 * 3.14159265358979323846 * frequency * static_cast<double>(i) / kRate;
    samples[i] = static_cast<std::int16_t>(std::lround(8000.0 * std::sin(phase)));
  }
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string bytes;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u16 = [&](std::uint16_t v) {
    bytes.push_back(static_cast<char>(v & 0xff));
    bytes.push_back(static_cast<char>(v >> 8));
  };
  bytes += "RIFF";
  u32(36 + data_bytes);
  bytes += "WAVEfmt ";
  u32(16);
  u16(1);  // PCM
  u16(1);  // mono
  u32(kRate);
  u32(kRate * 2);
  u16(2);
  u16(16);
  bytes += "data";
  u32(data_bytes);
  for (auto s : samples) u16(static_cast<std::uint16_t>(s));
  write_text_file(path, bytes);
}

}  // namespace detail

/// Writes <out>/dataset (S4 and MS3, two videos each, frames at 256x192)
/// and <out>/bundle. Output depends only on `seed`.
inline FixtureLayout make_fixtures(const std::filesystem::path& out, std::uint64_t seed) {
  namespace fs = std::filesystem;
  constexpr int kSrcWidth = 256;
  constexpr int kSrcHeight = 192;
  constexpr int kVideosPerSplit = 2;

  const FixtureLayout layout{out / "dataset", out / "bundle"};
  const MockBackend mock(seed, 16);
  RecordedBackend recorded(mock.embedding_dim());

  for (Split split : {Split::S4, Split::MS3}) {
    for (int v = 0; v < kVideosPerSplit; ++v) {
      char id[32];
      std::snprintf(id, sizeof(id), "%s_%03d", split == Split::S4 ? "s4" : "ms3", v);
      const fs::path vdir = layout.dataset / to_string(split) / id;
      for (int t = 1; t <= kFramesPerVideo; ++t) {
        FramePair frame;
        frame.frame_id = make_frame_id(id, t);
        frame.t = t;
        const auto objects = mock.scene(frame);

        const double sx = static_cast<double>(kSrcWidth) / kFrameSize;
        const double sy = static_cast<double>(kSrcHeight) / kFrameSize;
        SplitMix64 rng(fnv1a64(frame.frame_id, fnv1a64("image" + std::to_string(seed))));
        Image img(kSrcWidth, kSrcHeight);
        for (int y = 0; y < kSrcHeight; ++y)
          for (int x = 0; x < kSrcWidth; ++x) {
            auto* p = img.pixel(x, y);
            p[0] = static_cast<std::uint8_t>(40 + x / 4);
            p[1] = static_cast<std::uint8_t>(60 + y / 4);
            p[2] = 90;
          }
        BinaryMask gt(kSrcWidth, kSrcHeight);
        for (const auto& o : objects) {
          const BoundingBox scaled{o.box.x_min * sx, o.box.y_min * sy, o.box.x_max * sx, o.box.y_max * sy};
          const auto area = rasterize_box(scaled, kSrcWidth, kSrcHeight);
          const std::uint8_t r = static_cast<std::uint8_t>(rng.below(256));
          const std::uint8_t g = static_cast<std::uint8_t>(rng.below(256));
          const std::uint8_t b = static_cast<std::uint8_t>(rng.below(256));
          for (int y = 0; y < kSrcHeight; ++y)
            for (int x = 0; x < kSrcWidth; ++x) {
              if (!area.at(x, y)) continue;
              auto* p = img.pixel(x, y);
              p[0] = r;
              p[1] = g;
              p[2] = b;
              gt.set(x, y, o.sounding);
            }
        }
        const std::string name = std::to_string(t);
        write_image_png(vdir / "frames" / (name + ".png"), img);
        write_mask_png(vdir / "gt" / (name + ".png"), gt);
        detail::write_wav_tone(vdir / "audio" / (name + ".wav"), 220.0 + 40.0 * static_cast<double>(rng.below(10)));

        record_frame(mock, frame, recorded, PipelineConfig{}.grid_size);
      }
    }
  }
  write_bundle(recorded, layout.bundle);
  return layout;
}

}  // namespace cmsf

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

#include "cmsf/bundle.hpp"

#include <gtest/gtest.h>

#include "cmsf/fixtures.hpp"
#include "cmsf/mock_backend.hpp"
#include "test_util.hpp"

namespace cmsf {
namespace {

namespace fs = std::filesystem;
using testing::ScratchDir;

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = detail::read_text_file(e.path());
  return files;
}

RecordedBackend recorded_mock(std::uint64_t seed, int frames) {
  const MockBackend mock(seed);
  RecordedBackend rec(mock.embedding_dim());
  for (int t = 1; t <= frames; ++t) {
    FramePair f;
    f.frame_id = "vid/" + std::to_string(t);
    record_frame(mock, f, rec, 16);
  }
  return rec;
}

void write_manifest(const fs::path& dir, const nlohmann::json& manifest) {
  detail::write_json_file(dir / "manifest.json", manifest);
}

TEST(BundleTest, WriteLoadRewriteIsByteIdentical) {
  ScratchDir dir("bundle_rt");
  const auto rec = recorded_mock(1, 2);
  write_bundle(rec, dir / "a");
  const auto loaded = load_bundle(dir / "a");
  EXPECT_EQ(loaded.records().size(), rec.records().size());
  EXPECT_EQ(loaded.frames(), rec.frames());
  EXPECT_EQ(loaded.embedding_dim(), rec.embedding_dim());
  for (const auto& [key, value] : rec.records()) {
    ASSERT_TRUE(loaded.records().count(key)) << key.str();
    EXPECT_TRUE(loaded.records().at(key) == value) << key.str();
  }
  write_bundle(loaded, dir / "b");
  EXPECT_EQ(read_tree(dir / "a"), read_tree(dir / "b"));
  EXPECT_EQ(bundle_hash(dir / "a"), bundle_hash(dir / "b"));
}

TEST(BundleTest, LoadedBackendAnswersLikeTheSource) {
  ScratchDir dir("bundle_replay");
  const MockBackend mock(5);
  write_bundle(recorded_mock(5, 1), dir.path());
  const auto rec = load_bundle(dir.path());
  FramePair f;
  f.frame_id = "vid/1";
  EXPECT_EQ(rec.tag_audio(f), mock.tag_audio(f));
  EXPECT_EQ(rec.propose_class_agnostic(f), mock.propose_class_agnostic(f));
  const PromptSet grid = grid_points(16, 224, 224);
  EXPECT_EQ(rec.segment(f, grid), mock.segment(f, grid));
  EXPECT_EQ(rec.embed_audio(f), mock.embed_audio(f));
  for (const auto& p : mock.propose_class_agnostic(f)) EXPECT_EQ(rec.embed_image(f, p.box), mock.embed_image(f, p.box));
}

TEST(BundleTest, EmptyBundleAnswersMissingRecord) {
  ScratchDir dir("bundle_empty");
  write_manifest(dir.path(), {{"format", "cmsf-bundle"}, {"version", 1}, {"embedding_dim", 16}, {"frames", nlohmann::json::array()}});
  const auto rec = load_bundle(dir.path());
  FramePair f;
  f.frame_id = "any/1";
  EXPECT_THROW(rec.tag_audio(f), MissingRecordError);
  EXPECT_THROW(rec.propose_class_agnostic(f), MissingRecordError);
  EXPECT_THROW(rec.embed_audio(f), MissingRecordError);
}

TEST(BundleTest, RejectsMixedEmbeddingDims) {
  ScratchDir dir("bundle_dims");
  detail::write_json_file(dir / "v/1/a.json", embedding_to_json(EmbeddingVector(std::vector<double>(1024, 0.5))));
  detail::write_json_file(dir / "v/1/b.json", embedding_to_json(EmbeddingVector(std::vector<double>(512, 0.5))));
  nlohmann::json records = nlohmann::json::array(
      {{{"capability", "audio_embedding"}, {"path", "v/1/a.json"}},
       {{"capability", "image_embedding"}, {"qualifier", "crop:0,0,5,5"}, {"path", "v/1/b.json"}}});
  write_manifest(dir.path(), {{"format", "cmsf-bundle"},
                              {"version", 1},
                              {"embedding_dim", 1024},
                              {"frames", {{{"frame_id", "v/1"}, {"records", records}}}}});
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);
}

TEST(BundleTest, RejectsCorruption) {
  ScratchDir dir("bundle_bad");
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);  // no manifest

  const nlohmann::json base{{"format", "cmsf-bundle"}, {"version", 1}, {"embedding_dim", 4}};
  auto with_records = [&](nlohmann::json records) {
    auto m = base;
    m["frames"] = {{{"frame_id", "v/1"}, {"width", 8}, {"height", 8}, {"records", records}}};
    return m;
  };

  auto m = base;
  m["version"] = 99;
  m["frames"] = nlohmann::json::array();
  write_manifest(dir.path(), m);
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);

  write_manifest(dir.path(), with_records({{{"capability", "audio_tags"}, {"path", "nope.json"}}}));
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);

  write_manifest(dir.path(), with_records({{{"capability", "telepathy"}, {"path", "x.json"}}}));
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);

  write_manifest(dir.path(), with_records({{{"capability", "audio_tags"}, {"path", "../escape.json"}}}));
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);

  write_mask_png(dir / "m.png", BinaryMask(10, 10));
  detail::write_json_file(dir / "c.json", nlohmann::json::array({{{"mask", "m.png"}, {"quality", 0.9}}}));
  write_manifest(dir.path(),
                 with_records({{{"capability", "mask_candidates"}, {"qualifier", "box:0,0,1,1"}, {"path", "c.json"}}}));
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);

  detail::write_text_file(dir / "t.json", "[{\"label\": \"x\"}]");
  write_manifest(dir.path(), with_records({{{"capability", "audio_tags"}, {"path", "t.json"}}}));
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);

  m = with_records(nlohmann::json::array());
  m["incomplete"] = true;
  write_manifest(dir.path(), m);
  EXPECT_THROW(load_bundle(dir.path()), CorruptBundleError);
}

TEST(BundleTest, HashTracksContent) {
  ScratchDir dir("bundle_hash");
  write_bundle(recorded_mock(2, 1), dir / "a");
  const auto h = bundle_hash(dir / "a");
  EXPECT_EQ(h, bundle_hash(dir / "a"));
  EXPECT_EQ(h.rfind("fnv1a64:", 0), 0u);
  detail::write_text_file(dir / "a/extra.txt", "x");
  EXPECT_NE(h, bundle_hash(dir / "a"));
}

}  // namespace
}  // namespace cmsf

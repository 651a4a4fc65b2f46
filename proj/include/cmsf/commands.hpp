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

// Subcommand implementations behind the `cmsf` tool. Each returns the
// process exit code: 0 success, 1 runtime/data error, 2 usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmsf/bundle.hpp"
#include "cmsf/dataset.hpp"
#include "cmsf/evaluation.hpp"
#include "cmsf/fixtures.hpp"
#include "cmsf/mask_io.hpp"
#include "cmsf/pipelines.hpp"
#include "cmsf/render.hpp"

namespace cmsf {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitUsage = 2 };

struct RunOptions {
  std::filesystem::path bundle;
  std::filesystem::path dataset;
  std::string split;
  std::string variant;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  unsigned workers = 1;
};

/// Output tree: <out>/<split>/<video_id>/<t>.png, <t>.rle.json and
/// <out>/<split>/run_manifest.json.
inline int cmd_run(const RunOptions& opt, std::ostream& err = std::cerr) {
  const auto variant = variant_from_string(opt.variant);
  if (!variant) {
    err << "error: unknown --variant '" << opt.variant << "' (at-gdino-sam | owod-bind | sam-bind)\n";
    return kExitUsage;
  }
  const auto split = split_from_string(opt.split);
  if (!split) {
    err << "error: unknown --split '" << opt.split << "' (S4 | MS3)\n";
    return kExitUsage;
  }

  const std::filesystem::path split_out = opt.out / opt.split;
  nlohmann::json manifest{{"variant", to_string(*variant)}, {"split", opt.split}, {"complete", false}};
  try {
    PipelineConfig cfg;
    if (opt.config) cfg = config_from_json(detail::read_json_file(*opt.config));
    manifest["config"] = config_to_json(cfg);

    const auto backend = load_bundle(opt.bundle);
    manifest["bundle"] = {{"path", opt.bundle.generic_string()}, {"hash", bundle_hash(opt.bundle)}};
    const auto index = load_dataset(opt.dataset, *split);
    manifest["dataset"] = {{"root", opt.dataset.generic_string()}, {"videos", index.videos.size()}};

    const auto frames = index.all_frames();
    const auto results = run_sequence(frames, cfg, backend, *variant, opt.workers);

    auto entries = nlohmann::json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::string png = frames[i].frame_id + ".png";
      const std::string rle = frames[i].frame_id + ".rle.json";
      write_mask_png(split_out / png, results[i].mask);
      write_mask_rle(split_out / rle, results[i].mask);
      entries.push_back({{"frame_id", frames[i].frame_id},
                         {"trace", trace_to_json(results[i].trace)},
                         {"foreground", results[i].mask.count()},
                         {"mask_png", png},
                         {"mask_rle", rle}});
    }
    manifest["frames"] = std::move(entries);
    manifest["complete"] = true;
    detail::write_json_file(split_out / "run_manifest.json", manifest);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    manifest["error"] = e.what();
    try {
      detail::write_json_file(split_out / "run_manifest.json", manifest);
    } catch (const std::exception&) {
    }
    return kExitError;
  }
}

struct EvalOptions {
  std::vector<std::filesystem::path> preds;
  std::filesystem::path dataset;
  std::vector<std::string> splits;
  double beta_sq = kDefaultBetaSq;
  std::filesystem::path out;
};

namespace detail {

/// Row label: the variant recorded by `cmsf run`, else the directory name.
inline std::string prediction_label(const std::filesystem::path& pred, const std::string& split) {
  const auto manifest = pred / split / "run_manifest.json";
  if (std::filesystem::is_regular_file(manifest)) {
    const auto j = read_json_file(manifest);
    if (auto v = variant_from_string(j.value("variant", std::string{}))) return display_name(*v);
  }
  auto name = pred.filename().string();
  if (name.empty()) name = pred.parent_path().filename().string();
  return name;
}

}  // namespace detail

/// Evaluates each prediction tree against the ground truth of each split;
/// writes <out>/report.json and <out>/report.txt.
inline int cmd_eval(const EvalOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  if (opt.preds.empty() || opt.splits.empty()) {
    err << "error: eval needs at least one --pred and one --split\n";
    return kExitUsage;
  }
  if (!(opt.beta_sq > 0.0)) {
    err << "error: --beta-sq must be positive\n";
    return kExitUsage;
  }
  for (const auto& s : opt.splits) {
    if (!split_from_string(s)) {
      err << "error: unknown --split '" << s << "'\n";
      return kExitUsage;
    }
  }

  Report report;
  std::vector<std::string> failures;
  try {
    for (const auto& pred : opt.preds) {
      for (const auto& split_name : opt.splits) {
        const auto index = load_dataset(opt.dataset, *split_from_string(split_name));
        const auto label = detail::prediction_label(pred, split_name);
        std::vector<FrameMask> preds, gts;
        for (const auto& video : index.videos) {
          std::vector<FrameMask> vp, vg;
          std::string problem;
          for (std::size_t i = 0; i < video.frames.size(); ++i) {
            const auto& frame = video.frames[i];
            const auto path = pred / split_name / (frame.frame_id + ".png");
            if (!std::filesystem::is_regular_file(path)) {
              problem = "missing prediction " + path.string();
              break;
            }
            try {
              vp.push_back({frame.frame_id, read_mask_png(path)});
              vg.push_back({frame.frame_id, load_gt_mask(video.gt_masks[i])});
            } catch (const Error& e) {
              problem = e.what();
              break;
            }
            if (!vp.back().mask.same_shape(vg.back().mask)) {
              problem = "prediction " + path.string() + " is not " + std::to_string(kFrameSize) + "x" +
                        std::to_string(kFrameSize);
              break;
            }
          }
          if (!problem.empty()) {
            failures.push_back(label + " " + split_name + " video " + video.video_id + ": " + problem);
            continue;
          }
          preds.insert(preds.end(), vp.begin(), vp.end());
          gts.insert(gts.end(), vg.begin(), vg.end());
        }
        auto row = std::find_if(report.begin(), report.end(), [&](const ReportRow& r) { return r.variant == label; });
        if (row == report.end()) {
          report.push_back({label, {}});
          row = std::prev(report.end());
        }
        row->by_split[split_name] = evaluate_sequence(preds, gts, opt.beta_sq);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (!failures.empty()) {
    for (const auto& f : failures) err << "alignment error: " << f << "\n";
    return kExitError;
  }

  try {
    const std::string text = report_table(report);
    detail::write_json_file(opt.out / "report.json", report_json(report));
    detail::write_text_file(opt.out / "report.txt", text);
    out << text;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}

inline int cmd_render(const std::filesystem::path& image, const std::filesystem::path& mask,
                      const std::filesystem::path& out, std::ostream& err = std::cerr) {
  try {
    write_image_png(out, overlay_mask(read_image_png(image), read_mask_png(mask)));
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

inline int cmd_make_fixtures(const std::filesystem::path& out, std::uint64_t seed, std::ostream& err = std::cerr) {
  try {
    make_fixtures(out, seed);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace cmsf

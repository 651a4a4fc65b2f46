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

// Mean IoU and F-measure over aligned prediction / ground-truth sequences,
// plus the variant x split report table.

#include <cmath>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmsf/error.hpp"
#include "cmsf/geometry.hpp"

namespace cmsf {

inline constexpr double kDefaultBetaSq = 0.3;

struct FrameScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Pixel precision/recall and F_beta. Degenerate cases:
///   pred empty, gt empty      -> P = R = F = 1
///   pred empty, gt nonempty   -> P = 1, R = 0, F = 0
///   pred nonempty, gt empty   -> P = 0, R = 1, F = 0
inline FrameScore frame_fscore(const BinaryMask& pred, const BinaryMask& gt, double beta_sq = kDefaultBetaSq) {
  detail::require_same_shape(pred, gt, "frame_fscore");
  if (!(beta_sq > 0.0)) throw InvalidArgument("beta_sq must be positive");
  std::size_t tp = 0, fp = 0, fn = 0;
  auto p = pred.pixels();
  auto g = gt.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) {
    tp += p[i] & g[i];
    fp += p[i] & (g[i] ^ 1);
    fn += (p[i] ^ 1) & g[i];
  }
  const bool pred_empty = tp + fp == 0;
  const bool gt_empty = tp + fn == 0;
  if (pred_empty && gt_empty) return {1.0, 1.0, 1.0};
  FrameScore s;
  s.precision = pred_empty ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.recall = gt_empty ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (tp == 0) return s;  // f stays 0
  s.f = (1.0 + beta_sq) * s.precision * s.recall / (beta_sq * s.precision + s.recall);
  return s;
}

struct FrameMask {
  std::string frame_id;
  BinaryMask mask;
};

struct FrameMetrics {
  std::string frame_id;
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;

  friend bool operator==(const FrameMetrics&, const FrameMetrics&) = default;
};

struct EvalResult {
  double m_iou = 0.0;
  double f_score = 0.0;
  double beta_sq = kDefaultBetaSq;
  std::vector<FrameMetrics> per_frame;

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

/// Running mean, for callers that see frames one at a time.
class StreamingMean {
 public:
  void add(double x) {
    ++n_;
    mean_ += (x - mean_) / static_cast<double>(n_);
  }
  double value() const { return mean_; }
  std::size_t count() const { return n_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
};

inline double batch_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

/// Per-frame metrics and their unweighted means, folded in frame order.
inline EvalResult evaluate_sequence(std::span<const FrameMask> preds, std::span<const FrameMask> gts,
                                    double beta_sq = kDefaultBetaSq) {
  if (preds.size() != gts.size()) {
    throw AlignmentError("prediction count " + std::to_string(preds.size()) + " != ground-truth count " +
                         std::to_string(gts.size()));
  }
  EvalResult r;
  r.beta_sq = beta_sq;
  std::vector<double> ious, fs;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].frame_id != gts[i].frame_id) {
      throw AlignmentError("frame " + std::to_string(i) + ": prediction '" + preds[i].frame_id +
                           "' vs ground truth '" + gts[i].frame_id + "'");
    }
    FrameMetrics m;
    m.frame_id = gts[i].frame_id;
    try {
      m.iou = mask_iou(preds[i].mask, gts[i].mask);
      const auto s = frame_fscore(preds[i].mask, gts[i].mask, beta_sq);
      m.precision = s.precision;
      m.recall = s.recall;
      m.f = s.f;
    } catch (const ShapeError& e) {
      throw ShapeError(m.frame_id + ": " + e.what());
    }
    ious.push_back(m.iou);
    fs.push_back(m.f);
    r.per_frame.push_back(std::move(m));
  }
  r.m_iou = batch_mean(ious);
  r.f_score = batch_mean(fs);
  return r;
}

/// One table row: a variant's results per split.
struct ReportRow {
  std::string variant;
  std::map<std::string, EvalResult> by_split;
};

using Report = std::vector<ReportRow>;

inline const std::vector<std::string>& report_splits() {
  static const std::vector<std::string> splits{"S4", "MS3"};
  return splits;
}

/// Fixed-width plain-text table: rows are variants, columns S4/MS3 x M_IOU/F_score.
inline std::string report_table(const Report& report) {
  constexpr std::size_t kCell = 19;  // " %8s %8s "
  std::size_t name_width = 14;
  for (const auto& row : report) name_width = std::max(name_width, row.variant.size() + 2);

  auto pad = [](std::string s, std::size_t width) {
    s.resize(std::max(s.size(), width), ' ');
    return s;
  };
  auto centre = [](const std::string& s, std::size_t width) {
    const std::size_t left = (width - s.size()) / 2;
    return std::string(left, ' ') + s + std::string(width - s.size() - left, ' ');
  };
  auto pair_cell = [](const char* fmt, auto a, auto b) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), fmt, a, b);
    return std::string(buf);
  };
  auto finish = [](std::string line) {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line + "\n";
  };

  const auto& splits = report_splits();
  std::string title = pad("Approach", name_width), sub = pad("", name_width),
              rule = std::string(name_width, '-');
  for (std::size_t i = 0; i < splits.size(); ++i) {
    title += "|" + centre(splits[i], kCell);
    sub += "|" + pair_cell(" %8s %8s ", "M_IOU", "F_score");
    rule += "+" + std::string(kCell, '-');
  }
  std::string out = finish(title) + finish(sub) + rule + "\n";
  for (const auto& row : report) {
    std::string line = pad(row.variant, name_width);
    for (const auto& split : splits) {
      auto it = row.by_split.find(split);
      line += "|" + (it == row.by_split.end() ? pair_cell(" %8s %8s ", "-", "-")
                                              : pair_cell(" %8.2f %8.2f ", it->second.m_iou, it->second.f_score));
    }
    out += finish(line);
  }
  return out;
}

inline nlohmann::json eval_to_json(const std::string& variant, const std::string& split, const EvalResult& r) {
  auto frames = nlohmann::json::array();
  for (const auto& f : r.per_frame) {
    frames.push_back(
        {{"frame_id", f.frame_id}, {"iou", f.iou}, {"precision", f.precision}, {"recall", f.recall}, {"f", f.f}});
  }
  return {{"variant", variant}, {"split", split},         {"m_iou", r.m_iou},
          {"f_score", r.f_score}, {"beta_sq", r.beta_sq}, {"per_frame", frames}};
}

/// Array of {variant, split, m_iou, f_score, beta_sq, per_frame}, full precision.
inline nlohmann::json report_json(const Report& report) {
  auto arr = nlohmann::json::array();
  for (const auto& row : report)
    for (const auto& [split, r] : row.by_split) arr.push_back(eval_to_json(row.variant, split, r));
  return arr;
}

inline Report report_from_json(const nlohmann::json& j) {
  Report report;
  try {
    for (const auto& e : j) {
      const auto variant = e.at("variant").get<std::string>();
      auto row = std::find_if(report.begin(), report.end(), [&](const ReportRow& r) { return r.variant == variant; });
      if (row == report.end()) {
        report.push_back({variant, {}});
        row = std::prev(report.end());
      }
      EvalResult r;
      r.m_iou = e.at("m_iou").get<double>();
      r.f_score = e.at("f_score").get<double>();
      r.beta_sq = e.at("beta_sq").get<double>();
      for (const auto& f : e.at("per_frame")) {
        r.per_frame.push_back({f.at("frame_id").get<std::string>(), f.at("iou").get<double>(),
                               f.at("precision").get<double>(), f.at("recall").get<double>(),
                               f.at("f").get<double>()});
      }
      row->by_split[e.at("split").get<std::string>()] = std::move(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

}  // namespace cmsf

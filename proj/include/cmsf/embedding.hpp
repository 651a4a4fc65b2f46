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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmsf/error.hpp"

namespace cmsf {

/// Vector in the joint audio-visual latent space. Always non-empty and finite.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidArgument("embedding must have dim >= 1");
    for (double v : values_)
      if (!std::isfinite(v)) throw InvalidArgument("embedding contains a non-finite value");
  }

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

struct SimilarityScoredProposal {
  std::size_t proposal_index = 0;
  double similarity = 0.0;

  friend bool operator==(const SimilarityScoredProposal&, const SimilarityScoredProposal&) = default;
};

/// dot(a,b) / (|a||b|), clamped to [-1, 1]. Sums run in ascending index order
/// in a single double accumulator, so the result is symmetric bit-for-bit.
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw ShapeError("embedding dim mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  auto va = a.values();
  auto vb = b.values();
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0.0 || nb == 0.0) throw DegenerateInputError("zero-norm embedding");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

/// One entry per candidate, most similar first; ties keep input order.
inline std::vector<SimilarityScoredProposal> rank_by_similarity(const EmbeddingVector& query,
                                                                std::span<const EmbeddingVector> candidates) {
  std::vector<SimilarityScoredProposal> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    try {
      out.push_back({i, cosine_similarity(candidates[i], query)});
    } catch (const ShapeError& e) {
      throw ShapeError("candidate " + std::to_string(i) + ": " + e.what());
    } catch (const DegenerateInputError& e) {
      throw DegenerateInputError("candidate " + std::to_string(i) + ": " + e.what());
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.similarity > b.similarity; });
  return out;
}

/// Keeps entries with similarity strictly above `tau`, preserving order.
inline std::vector<SimilarityScoredProposal> threshold_filter(std::span<const SimilarityScoredProposal> scored,
                                                              double tau) {
  std::vector<SimilarityScoredProposal> out;
  std::copy_if(scored.begin(), scored.end(), std::back_inserter(out),
               [tau](const auto& s) { return s.similarity > tau; });
  return out;
}

inline nlohmann::json embedding_to_json(const EmbeddingVector& e) {
  return {{"dim", e.dim()}, {"values", std::vector<double>(e.values().begin(), e.values().end())}};
}

inline EmbeddingVector embedding_from_json(const nlohmann::json& j) {
  std::vector<double> values;
  std::size_t dim = 0;
  try {
    dim = j.at("dim").get<std::size_t>();
    values = j.at("values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed embedding: ") + e.what());
  }
  if (values.size() != dim) {
    throw ShapeError("embedding declares dim " + std::to_string(dim) + " but has " +
                     std::to_string(values.size()) + " values");
  }
  return EmbeddingVector(std::move(values));
}

}  // namespace cmsf

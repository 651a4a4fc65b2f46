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

#include <stdexcept>
#include <string>
#include <utility>

namespace cmsf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on width/height or embedding dimension.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Input is well-formed but mathematically unusable (e.g. a zero-norm vector).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A recorded backend has no entry for the requested key.
class MissingRecordError : public Error {
 public:
  explicit MissingRecordError(std::string key)
      : Error("missing record: " + key), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class CorruptBundleError : public Error {
 public:
  using Error::Error;
};

/// Dataset tree does not follow the documented layout.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Predictions and ground truth are not frame-aligned.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage failed; what() carries the stage name and the cause.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string frame_id, const std::string& cause)
      : Error("stage '" + stage + "' failed on frame '" + frame_id + "': " + cause),
        stage_(std::move(stage)),
        frame_id_(std::move(frame_id)) {}
  const std::string& stage() const noexcept { return stage_; }
  const std::string& frame_id() const noexcept { return frame_id_; }

 private:
  std::string stage_;
  std::string frame_id_;
};

}  // namespace cmsf

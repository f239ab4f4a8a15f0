// Copyright 2026 The mdl Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdl {

/// Process exit codes used by the command line tool. Every library error
/// carries one so the CLI can map exceptions without inspecting messages.
enum class ErrorCode : int {
  kConfig = 2,
  kIo = 3,
  kDataContract = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

/// Invalid parameters or configuration values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &what)
      : Error(ErrorCode::kConfig, what) {}
};

/// File system failures.
class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error(ErrorCode::kIo, what) {}
};

/// Inputs that violate a documented data contract (shapes, ranges, formats).
class DataError : public Error {
 public:
  explicit DataError(const std::string &what)
      : Error(ErrorCode::kDataContract, what) {}
};

/// An error raised while processing one frame of a stream; keeps the
/// original error code.
class FrameError : public Error {
 public:
  FrameError(const Error &inner, std::size_t frame_index)
      : Error(inner.code(), "frame " + std::to_string(frame_index) + ": " + inner.what()),
        frame_index_(frame_index) {}

  std::size_t frame_index() const noexcept { return frame_index_; }

 private:
  std::size_t frame_index_;
};

}  // namespace mdl

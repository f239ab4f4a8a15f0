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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mdl/gait.hpp"

namespace mdl {

inline constexpr std::size_t kMarkerCount = 17;

/// Marker labels accepted in mocap CSV headers. Markers sit at segment
/// centres; the hip segment is the midpoint of l_hip and r_hip.
inline constexpr std::array<std::string_view, kMarkerCount> kMarkerLabels = {
    "head",       "neck",       "torso",      "l_hip",      "r_hip",
    "l_upperarm", "l_lowerarm", "l_hand",     "r_upperarm", "r_lowerarm",
    "r_hand",     "l_upperleg", "l_lowerleg", "l_foot",     "r_upperleg",
    "r_lowerleg", "r_foot",
};

enum class MocapErrorKind { kParse, kMissingMarker, kUnknownMarker, kNonMonotonicTime };

class MocapError : public DataError {
 public:
  MocapError(MocapErrorKind kind, const std::string &what) : DataError(what), kind_(kind) {}
  MocapErrorKind kind() const noexcept { return kind_; }

 private:
  MocapErrorKind kind_;
};

/// Parsed marker file. `markers[k]` follows the order of kMarkerLabels.
struct MocapRecording {
  std::vector<double> times;  // s, strictly increasing
  std::array<Eigen::Matrix3Xd, kMarkerCount> markers;

  std::size_t sample_count() const { return times.size(); }

  /// Mean rate over the recording, (n - 1) / (t_last - t_first).
  double native_sample_rate() const;
};

/// Reads `time,<marker>_x,<marker>_y,<marker>_z,...`. Column order is free;
/// lines starting with '#' and blank lines are skipped.
MocapRecording parse_mocap(std::istream &in, std::string_view source_name = "<stream>");
MocapRecording load_mocap(const std::filesystem::path &path);

void write_mocap(std::ostream &out, const MocapRecording &rec);

/// Markers -> 16 segments, linearly resampled to `target_rate` from the first
/// timestamp.
Trajectory mocap_to_trajectory(const MocapRecording &rec, double target_rate);

/// Inverse mapping used to produce marker files from a trajectory: the hip
/// markers are placed +-half_width along y around the hip centre.
MocapRecording trajectory_to_mocap(const Trajectory &traj, double hip_half_width = 0.1);

}  // namespace mdl

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

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "mdl/envelope.hpp"
#include "mdl/features.hpp"
#include "mdl/gait.hpp"
#include "mdl/pipeline.hpp"
#include "mdl/radar.hpp"
#include "mdl/tf.hpp"

namespace mdl {

namespace fs = std::filesystem;

/// Sidecar path: `<dir>/<stem>.meta`.
fs::path meta_path(const fs::path &binary);

/// `frame_%06d.bin`.
std::string frame_file_name(std::size_t index);

/// Little-endian float32 (re, im) pairs, range-major, plus a JSON sidecar with
/// N_s, N_p, T_p, f_c, B and frame_start.
void write_frame(const fs::path &path, const ChirpFrame &frame);

/// Reads a frame; the sidecar values replace the corresponding fields of
/// `base`. Size or sidecar inconsistencies raise DataError.
ChirpFrame read_frame(const fs::path &path, const RadarConfig &base = {});

/// Frame files of a directory in index order.
std::vector<fs::path> list_frames(const fs::path &dir);

/// Row-major float32 matrix with a JSON sidecar holding rows, cols, dtype
/// and the extra fields of `meta`.
void write_matrix(const fs::path &path, const Eigen::MatrixXd &m, nlohmann::json meta = {});
Eigen::MatrixXd read_matrix(const fs::path &path);
/// Row-major uint8 mask.
void write_mask(const fs::path &path, const BoolMatrix &m, nlohmann::json meta = {});
BoolMatrix read_mask(const fs::path &path);

void write_map(const fs::path &path, const RangeDopplerMap &map);

/// `frame,velocity_mps,meanfree_range_m,label`.
void write_features_csv(const fs::path &path, std::span<const FeatureSample> samples);
std::vector<FeatureSample> read_features_csv(const fs::path &path);

/// `frame,time_s,class,env_max_mps,env_min_mps,filtered`; missing classes
/// have no row.
void write_envelopes_csv(const fs::path &path, std::span<const EnvelopeEmission> emissions);

/// `time,<segment>_x,<segment>_y,<segment>_z,...` in SegmentId order.
void write_trajectory_csv(const fs::path &path, const Trajectory &traj);
Trajectory read_trajectory_csv(const fs::path &path);

/// `t,f,value` triplets.
void write_spectrogram_csv(const fs::path &path, const Spectrogram &s);

/// Writes `text` to `path`, raising IoError on failure.
void write_text(const fs::path &path, const std::string &text);
std::string read_text(const fs::path &path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace mdl

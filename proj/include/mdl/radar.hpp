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
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "mdl/body.hpp"
#include "mdl/gait.hpp"

namespace mdl {

/// Speed of light used by the radar model (m/s). The scenario figures
/// (7.5 cm bins, 0.5 ms chirps) are built on the rounded value.
inline constexpr double kSpeedOfLight = 3.0e8;

struct RadarConfig {
  double carrier_frequency = 25.0e9;  // Hz
  double bandwidth = 2.0e9;           // Hz
  double chirp_duration = 0.5e-3;     // s, chirp repetition interval T_p
  Eigen::Index samples_per_chirp = 256;  // range bins N_s
  Eigen::Index chirps_per_frame = 64;    // N_p, power of two
  Vec3 radar_position{0.0, 0.0, 1.0};
  double max_range = 19.0;  // m; segments beyond are not rendered
  std::optional<double> snr_db;  // per-cell SNR of a 1 m^2 scatterer; none = noise free
  std::uint64_t noise_seed = 0;

  double range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth); }
  double wavelength() const { return kSpeedOfLight / carrier_frequency; }
  double frame_duration() const { return static_cast<double>(chirps_per_frame) * chirp_duration; }
  /// Spacing of the Doppler bins expressed as velocity.
  double velocity_resolution() const;
  /// Largest velocity representable without Doppler aliasing.
  double max_unambiguous_velocity() const;

  void validate() const;
};

/// Radar side of the two scenario presets: radar 1 m above ground at the
/// origin, looking along +x. The matching gait presets live in scenario.hpp.
enum class Preset { kModelA, kModelB };

std::optional<Preset> parse_preset(std::string_view name);
std::string_view preset_name(Preset p);
RadarConfig preset_radar(Preset p);

/// c / (4 f_c v_max).
double chirp_duration(double carrier_frequency, double max_velocity);

struct ChirpCount {
  double raw;           // c / (2 f_c T_p v_res)
  Eigen::Index count;   // smallest power of two >= raw
};

ChirpCount chirps_per_frame(double carrier_frequency, double chirp_duration,
                            double velocity_resolution);

/// v = f_d c / (2 f_c); positive Doppler means approaching.
double doppler_to_velocity(double doppler, double carrier_frequency);
double velocity_to_doppler(double velocity, double carrier_frequency);

/// One frame: rows are range bins, columns are chirps.
struct ChirpFrame {
  Eigen::MatrixXcd data;
  double start_time = 0.0;
  RadarConfig config;
};

/// Range profile at time t: every selected segment's complex return is added
/// to the bin nearest its distance. Segments beyond max_range (or past the
/// last bin) are skipped.
Eigen::VectorXcd synth_range_profile(const Trajectory &traj, const ShapeTable &shapes,
                                     const RadarConfig &config, double t,
                                     const SegmentMask &segments = all_segments());

/// Column k is the range profile at frame_start + k * T_p. Adds receiver
/// noise when config.snr_db is set.
ChirpFrame synth_frame(const Trajectory &traj, const ShapeTable &shapes,
                       const RadarConfig &config, double frame_start,
                       const SegmentMask &segments = all_segments());

/// Noise-free single-segment frames for the same window; summing them in
/// SegmentId order reproduces the noise-free mixed frame bit for bit.
std::array<Eigen::MatrixXcd, kSegmentCount> synth_segment_frames(const Trajectory &traj,
                                                                 const ShapeTable &shapes,
                                                                 const RadarConfig &config,
                                                                 double frame_start);

/// Number of whole frames that fit in the trajectory span.
Eigen::Index frame_count(const Trajectory &traj, const RadarConfig &config);

}  // namespace mdl

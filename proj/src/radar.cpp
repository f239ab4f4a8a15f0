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

#include "mdl/radar.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mdl/rcs.hpp"

namespace mdl {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

void check_span(const Trajectory &traj, const RadarConfig &config, double frame_start) {
  const double frame_end = frame_start + config.frame_duration();
  if (!traj.contains(frame_start) || !traj.contains(frame_end))
    throw DataError("frame [" + std::to_string(frame_start) + ", " + std::to_string(frame_end) +
                    "] s is outside the trajectory span");
}

void accumulate(Eigen::Ref<Eigen::VectorXcd> profile, const Trajectory &traj,
                const ShapeTable &shapes, const RadarConfig &config, double t, SegmentId s) {
  const Vec3 p = traj.position_at(s, t);
  const auto g = geometry_of(config.radar_position, p);
  if (g.distance > config.max_range) return;
  const auto bin = static_cast<Eigen::Index>(std::round(g.distance / config.range_resolution()));
  if (bin >= profile.size()) return;
  const double sigma = rcs_ellipsoid(shapes[index_of(s)], g.theta, g.phi);
  profile(bin) += segment_return(sigma, g.distance, config.wavelength());
}

// Box-Muller on a 64-bit Mersenne Twister; the engine output is fixed by the
// standard so frames are reproducible across toolchains.
double unit_uniform(std::mt19937_64 &rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

void add_noise(ChirpFrame &frame) {
  const RadarConfig &config = frame.config;
  const double power = std::pow(10.0, -*config.snr_db / 10.0);
  const double sd = std::sqrt(power / 2.0);
  const auto index =
      static_cast<std::uint64_t>(std::llround(frame.start_time / config.frame_duration()));
  std::mt19937_64 rng(config.noise_seed * 0x9e3779b97f4a7c15ULL + index);
  for (Eigen::Index j = 0; j < frame.data.cols(); ++j) {
    for (Eigen::Index i = 0; i < frame.data.rows(); ++i) {
      const double r = std::sqrt(-2.0 * std::log(unit_uniform(rng)));
      const double a = 2.0 * std::numbers::pi * unit_uniform(rng);
      frame.data(i, j) += std::complex<double>(sd * r * std::cos(a), sd * r * std::sin(a));
    }
  }
}

}  // namespace

double RadarConfig::velocity_resolution() const {
  return doppler_to_velocity(1.0 / frame_duration(), carrier_frequency);
}

double RadarConfig::max_unambiguous_velocity() const {
  return doppler_to_velocity(0.5 / chirp_duration, carrier_frequency);
}

void RadarConfig::validate() const {
  if (!(carrier_frequency > 0.0)) throw ConfigError("carrier frequency must be positive");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!(chirp_duration > 0.0)) throw ConfigError("chirp duration must be positive");
  if (samples_per_chirp < 2) throw ConfigError("samples per chirp must be >= 2");
  if (chirps_per_frame < 2 || !is_power_of_two(chirps_per_frame))
    throw ConfigError("chirps per frame must be a power of two >= 2");
  if (!(max_range > 0.0)) throw ConfigError("max range must be positive");
  if (static_cast<double>(samples_per_chirp) * range_resolution() < max_range)
    throw ConfigError("samples_per_chirp * range_resolution must cover max_range");
  if (!radar_position.allFinite()) throw ConfigError("radar position must be finite");
  if (snr_db && !std::isfinite(*snr_db)) throw ConfigError("snr must be finite");
}

std::optional<Preset> parse_preset(std::string_view name) {
  if (name == "model-a") return Preset::kModelA;
  if (name == "model-b") return Preset::kModelB;
  return std::nullopt;
}

std::string_view preset_name(Preset p) { return p == Preset::kModelA ? "model-a" : "model-b"; }

RadarConfig preset_radar(Preset) {
  // Both scenarios share the radar; they differ in subject and stand-off.
  return RadarConfig{};
}

double chirp_duration(double carrier_frequency, double max_velocity) {
  if (!(carrier_frequency > 0.0) || !(max_velocity > 0.0))
    throw ConfigError("chirp_duration needs positive inputs");
  return kSpeedOfLight / (4.0 * carrier_frequency * max_velocity);
}

ChirpCount chirps_per_frame(double carrier_frequency, double chirp_duration,
                            double velocity_resolution) {
  if (!(carrier_frequency > 0.0) || !(chirp_duration > 0.0) || !(velocity_resolution > 0.0))
    throw ConfigError("chirps_per_frame needs positive inputs");
  const double raw = kSpeedOfLight / (2.0 * carrier_frequency * chirp_duration * velocity_resolution);
  Eigen::Index n = 1;
  while (static_cast<double>(n) < raw * (1.0 - 1e-12)) n *= 2;
  return {raw, n};
}

double doppler_to_velocity(double doppler, double carrier_frequency) {
  if (!(carrier_frequency > 0.0)) throw ConfigError("carrier frequency must be positive");
  return doppler * kSpeedOfLight / (2.0 * carrier_frequency);
}

double velocity_to_doppler(double velocity, double carrier_frequency) {
  if (!(carrier_frequency > 0.0)) throw ConfigError("carrier frequency must be positive");
  return velocity * 2.0 * carrier_frequency / kSpeedOfLight;
}

Eigen::VectorXcd synth_range_profile(const Trajectory &traj, const ShapeTable &shapes,
                                     const RadarConfig &config, double t,
                                     const SegmentMask &segments) {
  if (!traj.contains(t))
    throw DataError("time " + std::to_string(t) + " s is outside the trajectory span");
  Eigen::VectorXcd profile = Eigen::VectorXcd::Zero(config.samples_per_chirp);
  for (SegmentId s : kAllSegments)
    if (segments.test(index_of(s))) accumulate(profile, traj, shapes, config, t, s);
  return profile;
}

ChirpFrame synth_frame(const Trajectory &traj, const ShapeTable &shapes,
                       const RadarConfig &config, double frame_start,
                       const SegmentMask &segments) {
  config.validate();
  check_span(traj, config, frame_start);
  ChirpFrame frame;
  frame.start_time = frame_start;
  frame.config = config;
  frame.data.setZero(config.samples_per_chirp, config.chirps_per_frame);
  for (Eigen::Index k = 0; k < config.chirps_per_frame; ++k) {
    const double t = frame_start + static_cast<double>(k) * config.chirp_duration;
    for (SegmentId s : kAllSegments)
      if (segments.test(index_of(s))) accumulate(frame.data.col(k), traj, shapes, config, t, s);
  }
  if (config.snr_db) add_noise(frame);
  return frame;
}

std::array<Eigen::MatrixXcd, kSegmentCount> synth_segment_frames(const Trajectory &traj,
                                                                 const ShapeTable &shapes,
                                                                 const RadarConfig &config,
                                                                 double frame_start) {
  config.validate();
  check_span(traj, config, frame_start);
  std::array<Eigen::MatrixXcd, kSegmentCount> frames;
  for (SegmentId s : kAllSegments) {
    auto &m = frames[index_of(s)];
    m.setZero(config.samples_per_chirp, config.chirps_per_frame);
    for (Eigen::Index k = 0; k < config.chirps_per_frame; ++k) {
      const double t = frame_start + static_cast<double>(k) * config.chirp_duration;
      accumulate(m.col(k), traj, shapes, config, t, s);
    }
  }
  return frames;
}

Eigen::Index frame_count(const Trajectory &traj, const RadarConfig &config) {
  const double span = traj.end_time() - traj.start_time();
  return static_cast<Eigen::Index>(std::floor(span / config.frame_duration() + 1e-9));
}

}  // namespace mdl

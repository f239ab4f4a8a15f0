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

#include <Eigen/Core>

#include "mdl/body.hpp"

namespace mdl {

using Vec3 = Eigen::Vector3d;

/// Upper bound on any segment speed accepted in a trajectory (m/s).
inline constexpr double kMaxSegmentSpeed = 10.0;

/// Parameters of the analytic walking model.
struct GaitConfig {
  double subject_height = 1.75;     // m, in [1.0, 2.2]
  double relative_velocity = 1.4;   // m/s, walking speed V_WR
  std::optional<double> gait_cycle_duration;  // s; default 1.2 * 1.4 / V_WR
  double sample_rate = 1000.0;      // Hz
  Vec3 start_position{5.0, 0.0, 0.0};  // ground point under the body at t = 0
  Vec3 heading{-1.0, 0.0, 0.0};     // unit walking direction
  std::uint64_t random_seed = 0;    // selects the initial gait phase

  double cycle_duration() const;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Uniformly sampled 3D centre positions of all 16 segments.
class Trajectory {
 public:
  using Positions = std::array<Eigen::Matrix3Xd, kSegmentCount>;

  /// Validates the invariants (equal lengths, finite values, speed bound) and
  /// throws DataError when one is violated.
  Trajectory(double start_time, double sample_rate, Positions positions);

  double start_time() const { return start_time_; }
  double sample_rate() const { return sample_rate_; }
  double dt() const { return 1.0 / sample_rate_; }
  Eigen::Index size() const { return positions_[0].cols(); }
  double end_time() const { return time_at(size() - 1); }
  double time_at(Eigen::Index i) const {
    return start_time_ + static_cast<double>(i) / sample_rate_;
  }

  const Eigen::Matrix3Xd &positions(SegmentId s) const { return positions_[index_of(s)]; }
  const Positions &all_positions() const { return positions_; }

  bool contains(double t) const;

  /// Linear interpolation between samples. Times that land on a sample (to
  /// within 1e-9 of a step) return that sample exactly.
  Vec3 position_at(SegmentId s, double t) const;

 private:
  double start_time_;
  double sample_rate_;
  Positions positions_;
};

/// Analytic walking model.
///
/// The body translates along `heading` at V_WR with a vertical bob of
/// 0.02 * height at twice the gait frequency. Feet follow a stance/swing
/// profile: at rest for half a cycle, then forward speed 4 * V_WR * sin^2 over
/// the swing half, so the mean speed is V_WR and the peak 4 * V_WR. Lower and
/// upper legs carry 0.55 and 0.25 of the foot excursion. Arms swing
/// sinusoidally in antiphase with the same-side leg with relative speed
/// amplitudes 1.5, 1.0 and 0.4 * V_WR for hand, lower and upper arm. Right
/// limbs lag the left ones by half a cycle.
Trajectory generate_gait(const GaitConfig &config, double duration);

/// Central differences, one-sided at both ends. Output has one column per
/// trajectory sample.
Eigen::Matrix3Xd segment_velocity(const Trajectory &traj, SegmentId segment);

/// Per-sample speed (norm of segment_velocity).
Eigen::VectorXd segment_speed(const Trajectory &traj, SegmentId segment);

/// Linear-interpolation resampling onto a uniform grid starting at the
/// trajectory start time.
Trajectory resample(const Trajectory &traj, double target_rate);

}  // namespace mdl

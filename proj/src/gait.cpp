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

#include "mdl/gait.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

namespace mdl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-segment placement, in units of subject height.
struct SegmentLayout {
  double height;   // centre height above ground
  double lateral;  // offset from the midline, positive to the left
};

SegmentLayout layout_of(SegmentId s) {
  const double side = is_left(s) ? 1.0 : (is_right(s) ? -1.0 : 0.0);
  switch (s) {
    case SegmentId::kHead: return {0.93, 0.0};
    case SegmentId::kNeck: return {0.85, 0.0};
    case SegmentId::kTorso: return {0.70, 0.0};
    case SegmentId::kHip: return {0.53, 0.0};
    case SegmentId::kLeftUpperArm:
    case SegmentId::kRightUpperArm: return {0.72, 0.13 * side};
    case SegmentId::kLeftLowerArm:
    case SegmentId::kRightLowerArm: return {0.57, 0.13 * side};
    case SegmentId::kLeftHand:
    case SegmentId::kRightHand: return {0.46, 0.13 * side};
    case SegmentId::kLeftUpperLeg:
    case SegmentId::kRightUpperLeg: return {0.41, 0.055 * side};
    case SegmentId::kLeftLowerLeg:
    case SegmentId::kRightLowerLeg: return {0.16, 0.055 * side};
    case SegmentId::kLeftFoot:
    case SegmentId::kRightFoot: return {0.03, 0.055 * side};
  }
  return {0.0, 0.0};
}

// Fraction of the foot's excursion carried by each leg segment, and the share
// of the body bob the segment follows.
struct LegShare {
  double swing;
  double lift;
  double bob;
};

LegShare leg_share(SegmentId s) {
  switch (s) {
    case SegmentId::kLeftFoot:
    case SegmentId::kRightFoot: return {1.0, 1.0, 0.0};
    case SegmentId::kLeftLowerLeg:
    case SegmentId::kRightLowerLeg: return {0.55, 0.5, 0.0};
    default: return {0.25, 0.2, 0.5};
  }
}

// Relative forward speed amplitude of an arm segment, in units of V_WR.
double arm_speed_ratio(SegmentId s) {
  switch (s) {
    case SegmentId::kLeftHand:
    case SegmentId::kRightHand: return 1.5;
    case SegmentId::kLeftLowerArm:
    case SegmentId::kRightLowerArm: return 1.0;
    default: return 0.4;
  }
}

struct FootExcursion {
  double forward;  // relative to the translating body, zero mean over a cycle
  double lift;     // in [0, 1]
};

// Foot at rest for u in [0, 0.5), swinging with speed 4 V sin^2 for u in
// [0.5, 1). Integrating gives the absolute advance; subtracting V T u and the
// cycle mean V T / 4 leaves the periodic excursion.
FootExcursion foot_excursion(double u, double v, double cycle) {
  const double swing_time = 0.5 * cycle;
  double advance = 0.0;
  double lift = 0.0;
  if (u >= 0.5) {
    const double tau = (u - 0.5) * cycle;
    advance = 2.0 * v * tau -
              v * swing_time * std::sin(kTwoPi * tau / swing_time) / std::numbers::pi;
    lift = std::sin(std::numbers::pi * tau / swing_time);
  }
  return {advance - v * cycle * u + 0.25 * v * cycle, lift};
}

}  // namespace

double GaitConfig::cycle_duration() const {
  if (gait_cycle_duration) return *gait_cycle_duration;
  return 1.2 * 1.4 / relative_velocity;
}

void GaitConfig::validate() const {
  if (!(subject_height >= 1.0 && subject_height <= 2.2))
    throw ConfigError("subject_height must be in [1.0, 2.2] m, got " +
                      std::to_string(subject_height));
  if (!(relative_velocity > 0.0) || !std::isfinite(relative_velocity))
    throw ConfigError("relative velocity must be positive");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    throw ConfigError("sample rate must be positive");
  if (gait_cycle_duration && !(*gait_cycle_duration > 0.0))
    throw ConfigError("gait cycle duration must be positive");
  if (std::abs(heading.norm() - 1.0) > 1e-9)
    throw ConfigError("heading must have unit norm");
  if (Vec3::UnitZ().cross(heading).norm() < 1e-6)
    throw ConfigError("heading must not be vertical");
  if (!start_position.allFinite()) throw ConfigError("start position must be finite");
}

Trajectory::Trajectory(double start_time, double sample_rate, Positions positions)
    : start_time_(start_time), sample_rate_(sample_rate), positions_(std::move(positions)) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(start_time_))
    throw DataError("trajectory needs a positive sample rate and finite start time");
  const Eigen::Index n = positions_[0].cols();
  if (n < 1) throw DataError("trajectory is empty");
  const double max_step = kMaxSegmentSpeed / sample_rate_ * (1.0 + 1e-9);
  for (std::size_t s = 0; s < kSegmentCount; ++s) {
    const auto &p = positions_[s];
    const std::string name(segment_name(segment_at(s)));
    if (p.cols() != n) throw DataError("segment " + name + " has a different length");
    if (!p.allFinite()) throw DataError("segment " + name + " has non-finite positions");
    for (Eigen::Index i = 1; i < n; ++i) {
      if ((p.col(i) - p.col(i - 1)).norm() > max_step)
        throw DataError("segment " + name + " exceeds the 10 m/s speed bound at sample " +
                        std::to_string(i));
    }
  }
}

bool Trajectory::contains(double t) const {
  const double eps = 1e-9 * dt();
  return t >= start_time_ - eps && t <= end_time() + eps;
}

Vec3 Trajectory::position_at(SegmentId s, double t) const {
  if (!contains(t))
    throw DataError("time " + std::to_string(t) + " s outside trajectory span");
  const auto &p = positions_[index_of(s)];
  const double f = (t - start_time_) * sample_rate_;
  const double nearest = std::round(f);
  const Eigen::Index last = size() - 1;
  if (std::abs(f - nearest) < 1e-9) {
    const auto i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(nearest), 0, last);
    return p.col(i);
  }
  auto i0 = static_cast<Eigen::Index>(std::floor(f));
  i0 = std::clamp<Eigen::Index>(i0, 0, std::max<Eigen::Index>(last - 1, 0));
  const double w = f - static_cast<double>(i0);
  return (1.0 - w) * p.col(i0) + w * p.col(i0 + 1);
}

Trajectory generate_gait(const GaitConfig &config, double duration) {
  config.validate();
  const double cycle = config.cycle_duration();
  if (!(duration >= cycle))
    throw ConfigError("duration must cover at least one gait cycle (" + std::to_string(cycle) +
                      " s)");

  const double h = config.subject_height;
  const double v = config.relative_velocity;
  const double omega = kTwoPi / cycle;
  const Vec3 up = Vec3::UnitZ();
  const Vec3 forward = config.heading;
  const Vec3 left = up.cross(forward).normalized();
  const double phase0 =
      static_cast<double>(splitmix64(config.random_seed) >> 11) * 0x1.0p-53;

  const auto n = static_cast<Eigen::Index>(std::floor(duration * config.sample_rate + 1e-9)) + 1;
  Trajectory::Positions positions;
  for (auto &p : positions) p.resize(3, n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / config.sample_rate;
    const double cycles = t / cycle + phase0;
    const double u_left = frac(cycles);
    const double u_right = frac(cycles + 0.5);
    const Vec3 body = config.start_position + forward * (v * t);
    const double bob = 0.02 * h * std::sin(2.0 * kTwoPi * u_left);

    for (SegmentId s : kAllSegments) {
      const SegmentLayout lay = layout_of(s);
      Vec3 p = body + left * (lay.lateral * h) + up * (lay.height * h);
      switch (limb_class_of(s)) {
        case LimbClass::kBase:
          p += up * bob;
          break;
        case LimbClass::kArms: {
          // antiphase with the same-side leg: fastest when the opposite foot
          // is at mid-swing
          const double u_opposite = is_left(s) ? u_right : u_left;
          const double amplitude = arm_speed_ratio(s) * v / omega;
          p += forward * (amplitude * std::sin(kTwoPi * (u_opposite - 0.75)));
          p += up * bob;
          break;
        }
        case LimbClass::kLegs:
        case LimbClass::kFeet: {
          const LegShare share = leg_share(s);
          const FootExcursion ex = foot_excursion(is_left(s) ? u_left : u_right, v, cycle);
          p += forward * (share.swing * ex.forward);
          p += up * (share.lift * 0.04 * h * ex.lift + share.bob * bob);
          break;
        }
      }
      positions[index_of(s)].col(i) = p;
    }
  }
  return Trajectory(0.0, config.sample_rate, std::move(positions));
}

Eigen::Matrix3Xd segment_velocity(const Trajectory &traj, SegmentId segment) {
  const auto &p = traj.positions(segment);
  const Eigen::Index n = p.cols();
  if (n < 2) throw DataError("velocity needs at least two trajectory samples");
  const double rate = traj.sample_rate();
  Eigen::Matrix3Xd vel(3, n);
  vel.col(0) = (p.col(1) - p.col(0)) * rate;
  vel.col(n - 1) = (p.col(n - 1) - p.col(n - 2)) * rate;
  if (n > 2)
    vel.middleCols(1, n - 2) = (p.rightCols(n - 2) - p.leftCols(n - 2)) * (0.5 * rate);
  return vel;
}

Eigen::VectorXd segment_speed(const Trajectory &traj, SegmentId segment) {
  return segment_velocity(traj, segment).colwise().norm().transpose();
}

Trajectory resample(const Trajectory &traj, double target_rate) {
  if (!(target_rate > 0.0) || !std::isfinite(target_rate))
    throw ConfigError("target rate must be positive");
  const double span = traj.end_time() - traj.start_time();
  if (span + 1e-12 < 1.0 / target_rate)
    throw DataError("trajectory is shorter than one output step");
  const auto n = static_cast<Eigen::Index>(std::floor(span * target_rate + 1e-9)) + 1;
  Trajectory::Positions positions;
  for (SegmentId s : kAllSegments) {
    auto &out = positions[index_of(s)];
    out.resize(3, n);
    for (Eigen::Index i = 0; i < n; ++i)
      out.col(i) = traj.position_at(s, traj.start_time() + static_cast<double>(i) / target_rate);
  }
  return Trajectory(traj.start_time(), target_rate, std::move(positions));
}

}  // namespace mdl

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

#include "mdl/body.hpp"

namespace mdl {

namespace {

constexpr std::array<std::string_view, kSegmentCount> kSegmentNames = {
    "head",           "neck",           "torso",          "hip",
    "left_upper_arm", "left_lower_arm", "left_hand",      "right_upper_arm",
    "right_lower_arm", "right_hand",    "left_upper_leg", "left_lower_leg",
    "left_foot",      "right_upper_leg", "right_lower_leg", "right_foot",
};

constexpr std::array<std::string_view, kLimbClassCount> kClassNames = {
    "base", "arms", "legs", "feet"};

}  // namespace

std::string_view segment_name(SegmentId s) { return kSegmentNames[index_of(s)]; }

std::optional<SegmentId> parse_segment(std::string_view name) {
  for (std::size_t i = 0; i < kSegmentCount; ++i)
    if (kSegmentNames[i] == name) return segment_at(i);
  return std::nullopt;
}

std::string_view limb_class_name(LimbClass c) { return kClassNames[index_of(c)]; }

std::optional<LimbClass> parse_limb_class(std::string_view name) {
  for (std::size_t i = 0; i < kLimbClassCount; ++i)
    if (kClassNames[i] == name) return limb_class_at(i);
  return std::nullopt;
}

LimbClass limb_class_of(SegmentId s) {
  switch (s) {
    case SegmentId::kHead:
    case SegmentId::kNeck:
    case SegmentId::kTorso:
    case SegmentId::kHip:
      return LimbClass::kBase;
    case SegmentId::kLeftUpperArm:
    case SegmentId::kLeftLowerArm:
    case SegmentId::kLeftHand:
    case SegmentId::kRightUpperArm:
    case SegmentId::kRightLowerArm:
    case SegmentId::kRightHand:
      return LimbClass::kArms;
    case SegmentId::kLeftUpperLeg:
    case SegmentId::kLeftLowerLeg:
    case SegmentId::kRightUpperLeg:
    case SegmentId::kRightLowerLeg:
      return LimbClass::kLegs;
    case SegmentId::kLeftFoot:
    case SegmentId::kRightFoot:
      return LimbClass::kFeet;
  }
  return LimbClass::kBase;
}

SegmentId mirror(SegmentId s) {
  switch (s) {
    case SegmentId::kLeftUpperArm: return SegmentId::kRightUpperArm;
    case SegmentId::kLeftLowerArm: return SegmentId::kRightLowerArm;
    case SegmentId::kLeftHand: return SegmentId::kRightHand;
    case SegmentId::kRightUpperArm: return SegmentId::kLeftUpperArm;
    case SegmentId::kRightLowerArm: return SegmentId::kLeftLowerArm;
    case SegmentId::kRightHand: return SegmentId::kLeftHand;
    case SegmentId::kLeftUpperLeg: return SegmentId::kRightUpperLeg;
    case SegmentId::kLeftLowerLeg: return SegmentId::kRightLowerLeg;
    case SegmentId::kLeftFoot: return SegmentId::kRightFoot;
    case SegmentId::kRightUpperLeg: return SegmentId::kLeftUpperLeg;
    case SegmentId::kRightLowerLeg: return SegmentId::kLeftLowerLeg;
    case SegmentId::kRightFoot: return SegmentId::kLeftFoot;
    default: return s;
  }
}

bool is_left(SegmentId s) {
  switch (s) {
    case SegmentId::kLeftUpperArm:
    case SegmentId::kLeftLowerArm:
    case SegmentId::kLeftHand:
    case SegmentId::kLeftUpperLeg:
    case SegmentId::kLeftLowerLeg:
    case SegmentId::kLeftFoot:
      return true;
    default:
      return false;
  }
}

bool is_right(SegmentId s) { return mirror(s) != s && !is_left(s); }

ShapeTable default_shapes(double subject_height) {
  if (!(subject_height > 0.0))
    throw ConfigError("subject height must be positive");
  const double k = subject_height / 1.75;
  const auto e = [k](double a, double b, double c) { return Ellipsoid{a * k, b * k, c * k}; };

  const Ellipsoid upper_arm = e(0.05, 0.05, 0.15);
  const Ellipsoid lower_arm = e(0.04, 0.04, 0.13);
  const Ellipsoid hand = e(0.05, 0.03, 0.08);
  const Ellipsoid upper_leg = e(0.08, 0.08, 0.20);
  const Ellipsoid lower_leg = e(0.06, 0.06, 0.20);
  // foot and ankle lumped, long axis vertical
  const Ellipsoid foot = e(0.06, 0.05, 0.10);

  return {
      e(0.10, 0.08, 0.12),  // head
      e(0.06, 0.06, 0.06),  // neck
      e(0.15, 0.12, 0.30),  // torso
      e(0.12, 0.16, 0.10),  // hip
      upper_arm, lower_arm, hand,
      upper_arm, lower_arm, hand,
      upper_leg, lower_leg, foot,
      upper_leg, lower_leg, foot,
  };
}

}  // namespace mdl

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
#include <bitset>
#include <cstddef>
#include <optional>
#include <string_view>

#include "mdl/error.hpp"

namespace mdl {

inline constexpr std::size_t kSegmentCount = 16;
inline constexpr std::size_t kLimbClassCount = 4;

/// The 16 ellipsoid body segments. Declaration order is the canonical order
/// used for tie-breaking everywhere (labeling argmax, superposition order).
enum class SegmentId : std::size_t {
  kHead,
  kNeck,
  kTorso,
  kHip,
  kLeftUpperArm,
  kLeftLowerArm,
  kLeftHand,
  kRightUpperArm,
  kRightLowerArm,
  kRightHand,
  kLeftUpperLeg,
  kLeftLowerLeg,
  kLeftFoot,
  kRightUpperLeg,
  kRightLowerLeg,
  kRightFoot,
};

/// Limb classes. Declaration order doubles as the prediction tie-break order.
enum class LimbClass : std::size_t { kBase, kArms, kLegs, kFeet };

using SegmentMask = std::bitset<kSegmentCount>;

inline SegmentMask all_segments() { return SegmentMask{}.set(); }

constexpr std::size_t index_of(SegmentId s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index_of(LimbClass c) { return static_cast<std::size_t>(c); }

constexpr SegmentId segment_at(std::size_t i) { return static_cast<SegmentId>(i); }
constexpr LimbClass limb_class_at(std::size_t i) { return static_cast<LimbClass>(i); }

inline constexpr std::array<SegmentId, kSegmentCount> kAllSegments = {
    SegmentId::kHead,          SegmentId::kNeck,          SegmentId::kTorso,
    SegmentId::kHip,           SegmentId::kLeftUpperArm,  SegmentId::kLeftLowerArm,
    SegmentId::kLeftHand,      SegmentId::kRightUpperArm, SegmentId::kRightLowerArm,
    SegmentId::kRightHand,     SegmentId::kLeftUpperLeg,  SegmentId::kLeftLowerLeg,
    SegmentId::kLeftFoot,      SegmentId::kRightUpperLeg, SegmentId::kRightLowerLeg,
    SegmentId::kRightFoot,
};

inline constexpr std::array<LimbClass, kLimbClassCount> kAllLimbClasses = {
    LimbClass::kBase, LimbClass::kArms, LimbClass::kLegs, LimbClass::kFeet};

/// Row order of the printed confusion table.
inline constexpr std::array<LimbClass, kLimbClassCount> kReportOrder = {
    LimbClass::kArms, LimbClass::kFeet, LimbClass::kLegs, LimbClass::kBase};

std::string_view segment_name(SegmentId s);
std::optional<SegmentId> parse_segment(std::string_view name);

/// Lower-case names: base, arms, legs, feet.
std::string_view limb_class_name(LimbClass c);
std::optional<LimbClass> parse_limb_class(std::string_view name);

/// Base: head, neck, torso, hip. Arms: upper/lower arms and hands.
/// Legs: upper/lower legs. Feet: feet.
LimbClass limb_class_of(SegmentId s);

/// Left/right counterpart; midline segments map to themselves.
SegmentId mirror(SegmentId s);

bool is_left(SegmentId s);
bool is_right(SegmentId s);

/// Ellipsoid radii (m) along the local x, y, z axes.
template <typename Scalar>
struct EllipsoidShape {
  Scalar a{};
  Scalar b{};
  Scalar c{};

  bool valid() const { return a > Scalar(0) && b > Scalar(0) && c > Scalar(0); }
};

using Ellipsoid = EllipsoidShape<double>;
using ShapeTable = std::array<Ellipsoid, kSegmentCount>;

/// Default radii for a 1.75 m subject, scaled linearly with height.
/// Local frames are world aligned: x forward, y lateral, z up.
ShapeTable default_shapes(double subject_height);

}  // namespace mdl

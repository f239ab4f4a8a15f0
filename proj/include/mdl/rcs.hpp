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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Core>

#include "mdl/body.hpp"

namespace mdl {

/// Line of sight from the radar to a segment, in the segment's (world
/// aligned) frame.
template <typename Scalar>
struct AspectGeometry {
  Scalar theta{};     // polar angle from +z, [0, pi]
  Scalar phi{};       // azimuth from +x, [0, 2 pi)
  Scalar distance{};  // m
};

/// Backscatter RCS (m^2) of an ellipsoid with radii (a, b, c) seen at aspect
/// angle theta and azimuth phi:
///
///   sigma = pi a^2 b^2 c^2 / (a^2 sin^2(theta) cos^2(phi)
///                             + b^2 sin^2(theta) sin^2(phi)
///                             + c^2 cos^2(theta))^2
template <typename Scalar>
Scalar rcs_ellipsoid(const EllipsoidShape<Scalar> &shape, Scalar theta, Scalar phi) {
  if (!shape.valid()) throw DataError("ellipsoid radii must be positive");
  using std::cos;
  using std::sin;
  const Scalar a2 = shape.a * shape.a;
  const Scalar b2 = shape.b * shape.b;
  const Scalar c2 = shape.c * shape.c;
  const Scalar st = sin(theta), ct = cos(theta);
  const Scalar sp = sin(phi), cp = cos(phi);
  const Scalar den = a2 * st * st * cp * cp + b2 * st * st * sp * sp + c2 * ct * ct;
  return std::numbers::pi_v<Scalar> * a2 * b2 * c2 / (den * den);
}

/// Complex return sqrt(sigma) * exp(-j 4 pi d / lambda).
template <typename Scalar>
std::complex<Scalar> segment_return(Scalar sigma, Scalar distance, Scalar wavelength) {
  if (!(sigma > Scalar(0)) || !(distance > Scalar(0)) || !(wavelength > Scalar(0)))
    throw DataError("segment_return needs positive sigma, distance and wavelength");
  using std::sqrt;
  const Scalar phase = Scalar(-4) * std::numbers::pi_v<Scalar> * distance / wavelength;
  return std::polar(sqrt(sigma), phase);
}

template <typename Derived1, typename Derived2>
AspectGeometry<typename Derived1::Scalar> geometry_of(const Eigen::MatrixBase<Derived1> &radar,
                                                      const Eigen::MatrixBase<Derived2> &segment) {
  using Scalar = typename Derived1::Scalar;
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived1, 3)
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived2, 3)
  const Eigen::Matrix<Scalar, 3, 1> los = segment - radar;
  const Scalar d = los.norm();
  if (!(d > Scalar(0))) throw DataError("radar and segment positions coincide");
  using std::acos;
  using std::atan2;
  using std::clamp;
  AspectGeometry<Scalar> g;
  g.distance = d;
  g.theta = acos(clamp(los.z() / d, Scalar(-1), Scalar(1)));
  Scalar phi = atan2(los.y(), los.x());
  if (phi < Scalar(0)) phi += Scalar(2) * std::numbers::pi_v<Scalar>;
  if (phi >= Scalar(2) * std::numbers::pi_v<Scalar>) phi = Scalar(0);
  g.phi = phi;
  return g;
}

}  // namespace mdl

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

// Independent reference implementations and fixtures shared by the tests.
// None of these call into the library code they are used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "mdl/body.hpp"
#include "mdl/features.hpp"
#include "mdl/gait.hpp"
#include "mdl/tree.hpp"

namespace oracle {

/// Trajectory with one segment moving linearly from `start` with constant
/// velocity; every other segment is parked far outside the radar range.
inline mdl::Trajectory point_scatterer(mdl::SegmentId moving, const Eigen::Vector3d &start,
                                       const Eigen::Vector3d &velocity, double duration,
                                       double rate = 10000.0) {
  const auto n = static_cast<Eigen::Index>(std::llround(duration * rate)) + 1;
  mdl::Trajectory::Positions pos;
  for (std::size_t s = 0; s < mdl::kSegmentCount; ++s) {
    pos[s].resize(3, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mdl::segment_at(s) == moving)
        pos[s].col(i) = start + velocity * (static_cast<double>(i) / rate);
      else
        pos[s].col(i) = Eigen::Vector3d(60.0 + static_cast<double>(s), 0.0, 1.0);
    }
  }
  return mdl::Trajectory(0.0, rate, std::move(pos));
}

/// Direct evaluation of the ellipsoid cross-section formula in long double.
inline long double rcs(long double a, long double b, long double c, long double theta,
                       long double phi) {
  const long double st = std::sin(theta), ct = std::cos(theta);
  const long double sp = std::sin(phi), cp = std::cos(phi);
  const long double den = a * a * st * st * cp * cp + b * b * st * st * sp * sp + c * c * ct * ct;
  return std::numbers::pi_v<long double> * a * a * b * b * c * c / (den * den);
}

/// O(n^2) DFT with the zero frequency moved to index n / 2.
inline Eigen::VectorXcd shifted_dft(const Eigen::VectorXcd &x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index f = k - n / 2;
    std::complex<long double> acc = 0;
    for (Eigen::Index m = 0; m < n; ++m) {
      const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(f * m) /
                              static_cast<long double>(n);
      acc += std::complex<long double>(x(m).real(), x(m).imag()) *
             std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    out(k) = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }
  return out;
}

struct OtsuResult {
  std::optional<int> boundary;  // k of threshold k / bins
  long double within = 0;
};

/// Exhaustive Otsu: every boundary k / bins splits the values into v <= t and
/// v > t; two-pass class variances weighted by class probability.
template <typename Matrix>
OtsuResult brute_otsu(const Matrix &grid, int bins) {
  std::vector<long double> v;
  for (Eigen::Index i = 0; i < grid.rows(); ++i)
    for (Eigen::Index j = 0; j < grid.cols(); ++j) v.push_back(grid(i, j));
  const long double n = static_cast<long double>(v.size());
  OtsuResult best;
  for (int k = 1; k < bins; ++k) {
    const long double t = static_cast<long double>(k) / bins;
    long double n1 = 0, n2 = 0, m1 = 0, m2 = 0;
    for (auto x : v) {
      if (x <= t) {
        n1 += 1;
        m1 += x;
      } else {
        n2 += 1;
        m2 += x;
      }
    }
    if (n1 == 0 || n2 == 0) continue;
    m1 /= n1;
    m2 /= n2;
    long double s1 = 0, s2 = 0;
    for (auto x : v) {
      if (x <= t)
        s1 += (x - m1) * (x - m1);
      else
        s2 += (x - m2) * (x - m2);
    }
    const long double within = (n1 / n) * (s1 / n1) + (n2 / n) * (s2 / n2);
    if (!best.boundary || within < best.within - 1e-15L) {
      best.boundary = k;
      best.within = within;
    }
  }
  return best;
}

struct SplitResult {
  mdl::Feature feature;
  double threshold;
  long double weighted_gini;
};

/// Exhaustive best root split: for each feature and every midpoint between
/// consecutive distinct values, the sample-weighted Gini of the two children.
inline std::optional<SplitResult> brute_best_split(const std::vector<mdl::FeatureSample> &samples,
                                                   std::size_t min_leaf) {
  std::optional<SplitResult> best;
  for (int f = 0; f < mdl::kFeatureCount; ++f) {
    const auto feature = static_cast<mdl::Feature>(f);
    std::vector<double> values;
    for (const auto &s : samples) values.push_back(mdl::feature_value(s, feature));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double t = values[i] + (values[i + 1] - values[i]) / 2.0;
      long double left[4] = {}, right[4] = {};
      long double nl = 0, nr = 0;
      for (const auto &s : samples) {
        const auto c = static_cast<std::size_t>(*s.label);
        if (mdl::feature_value(s, feature) < t) {
          left[c] += 1;
          nl += 1;
        } else {
          right[c] += 1;
          nr += 1;
        }
      }
      if (nl < static_cast<long double>(min_leaf) || nr < static_cast<long double>(min_leaf)) continue;
      long double gl = 1, gr = 1;
      for (int c = 0; c < 4; ++c) {
        gl -= (left[c] / nl) * (left[c] / nl);
        gr -= (right[c] / nr) * (right[c] / nr);
      }
      const long double w = (nl * gl + nr * gr) / (nl + nr);
      if (!best || w < best->weighted_gini - 1e-15L) best = SplitResult{feature, t, w};
    }
  }
  return best;
}

/// Sorted-window median with clamped indices (no missing values).
inline std::vector<double> naive_median(const std::vector<double> &x, int order) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t h = order / 2;
  std::vector<double> out;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::vector<double> w;
    for (std::ptrdiff_t d = -h; d <= h; ++d) w.push_back(x[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i + d, 0, n - 1))]);
    std::sort(w.begin(), w.end());
    out.push_back(w[static_cast<std::size_t>(h)]);
  }
  return out;
}

}  // namespace oracle

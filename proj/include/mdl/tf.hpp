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

/**
 * \file tf.hpp
 * \brief Time-frequency and range-Doppler analysis, and the power removal
 * chain (dynamic-range clip, unit normalization, gamma mapping, Otsu
 * threshold) that turns a map into a binary detection mask.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mdl/error.hpp"
#include "mdl/radar.hpp"

namespace mdl {

/// Magnitudes below this are clamped before taking logarithms.
inline constexpr double kMagnitudeFloor = 1e-12;

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Log-power STFT. Rows are frequency bins (DC in the middle), columns are
/// analysis instants.
struct Spectrogram {
  Eigen::MatrixXd db;
  Eigen::VectorXd time_axis;      // s
  Eigen::VectorXd doppler_axis;   // Hz
  Eigen::VectorXd velocity_axis;  // m/s; empty when no carrier was given
  Eigen::Index window_len = 0;
  Eigen::Index hop = 0;
};

/// Log-power range-Doppler map: rows are range bins, columns Doppler bins
/// with zero velocity at column N_p / 2.
struct RangeDopplerMap {
  Eigen::MatrixXd db;
  double frame_time = 0.0;
  Eigen::VectorXd range_axis;     // m
  Eigen::VectorXd velocity_axis;  // m/s, positive = approaching
};

enum class GridSource { kSpectrogram, kRangeDoppler };

struct IntensityGrid {
  Eigen::MatrixXd values;  // in [0, 1]
  GridSource source = GridSource::kRangeDoppler;
};

struct ThresholdMask {
  BoolMatrix mask;
  double threshold = 0.0;
};

struct StftParams {
  Eigen::Index window_len = 256;
  Eigen::Index hop = 32;
  double sigma = 256.0 / 6.0;  // Gaussian window standard deviation, samples
};

/// Gaussian-window STFT in dB. Column k is centred on sample k * hop; samples
/// outside the signal are zero. Frequency bins are fftshifted so a positive
/// tone f0 peaks at the bin nearest +f0.
Spectrogram stft_spectrogram(const Eigen::VectorXcd &x, double sample_rate,
                             const StftParams &params = {},
                             std::optional<double> carrier_frequency = std::nullopt);

/// N_p-point FFT across chirps per range bin, shifted, |X|^2 in dB. The FFT is
/// unnormalized, so total map power is N_p times the frame energy.
RangeDopplerMap range_doppler_map(const ChirpFrame &frame);

/// Same map for a bare matrix with an explicit radar configuration.
RangeDopplerMap range_doppler_map(const Eigen::MatrixXcd &data, const RadarConfig &config,
                                  double frame_time);

/// Raises every cell to at least (max - dynamic_range_db). A non-positive
/// range leaves the map unchanged.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> clip_dynamic_range(
    const Eigen::MatrixBase<Derived> &db, typename Derived::Scalar dynamic_range_db) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = db;
  if (dynamic_range_db > Scalar(0) && out.size() > 0)
    out = out.cwiseMax(out.maxCoeff() - dynamic_range_db);
  return out;
}

/// Affine map of [min, max] onto [0, 1]; a constant matrix maps to zeros.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> normalize_to_unit(
    const Eigen::MatrixBase<Derived> &m) {
  using Scalar = typename Derived::Scalar;
  using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.size() == 0) return Result(m.rows(), m.cols());
  if (!m.allFinite()) throw DataError("normalize_to_unit: matrix has non-finite entries");
  const Scalar lo = m.minCoeff();
  const Scalar hi = m.maxCoeff();
  if (!(hi > lo)) return Result::Zero(m.rows(), m.cols());
  Result out = (m.array() - lo) / (hi - lo);
  return out.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
}

inline IntensityGrid normalize_to_unit(const RangeDopplerMap &map) {
  return {normalize_to_unit(map.db), GridSource::kRangeDoppler};
}

inline IntensityGrid normalize_to_unit(const Spectrogram &s) {
  return {normalize_to_unit(s.db), GridSource::kSpectrogram};
}

inline constexpr double kDefaultGamma = 0.65;

/// Elementwise S_out = S_in ^ gamma.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> gamma_transform(
    const Eigen::MatrixBase<Derived> &m, typename Derived::Scalar gamma) {
  if (!(gamma > 0)) throw ConfigError("gamma must be positive");
  return m.array().pow(gamma).matrix();
}

inline IntensityGrid gamma_transform(const IntensityGrid &grid, double gamma = kDefaultGamma) {
  return {gamma_transform(grid.values, gamma), grid.source};
}

inline constexpr int kDefaultHistogramBins = 256;

/// Otsu threshold on a [0, 1] grid.
///
/// Values are binned into `bins` equal-width bins. Every bin boundary k / bins
/// with both sides non-empty is a candidate; the candidate minimizing the
/// within-class variance Q1 s1^2 + Q2 s2^2 (computed from the raw values of
/// each class) wins, ties going to the smallest threshold. The mask is true
/// where the value exceeds the threshold. If no boundary separates the data,
/// the threshold is the largest value and the mask is all false.
template <typename Derived>
ThresholdMask otsu_threshold(const Eigen::MatrixBase<Derived> &grid,
                             int bins = kDefaultHistogramBins) {
  if (bins < 2) throw ConfigError("otsu_threshold needs at least 2 histogram bins");
  ThresholdMask out;
  out.mask = BoolMatrix::Constant(grid.rows(), grid.cols(), false);
  if (grid.size() == 0) return out;

  std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> sum(count.size(), 0.0);
  std::vector<double> sum_sq(count.size(), 0.0);
  for (Eigen::Index j = 0; j < grid.cols(); ++j) {
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
      const double v = static_cast<double>(grid(i, j));
      // Bin b holds (b / bins, (b + 1) / bins], so "v <= k / bins" is exactly
      // "bin < k" and the strict mask below agrees with the histogram split.
      const auto b = static_cast<std::size_t>(
          std::clamp(static_cast<long>(std::ceil(v * bins)) - 1, 0L, static_cast<long>(bins - 1)));
      count[b] += 1.0;
      sum[b] += v;
      sum_sq[b] += v * v;
    }
  }
  double total_n = 0.0, total_s = 0.0, total_s2 = 0.0;
  for (std::size_t b = 0; b < count.size(); ++b) {
    total_n += count[b];
    total_s += sum[b];
    total_s2 += sum_sq[b];
  }

  std::optional<int> best;
  double best_within = 0.0;
  double n1 = 0.0, s1 = 0.0, s1_2 = 0.0;
  for (int k = 1; k < bins; ++k) {
    const auto prev = static_cast<std::size_t>(k - 1);
    n1 += count[prev];
    s1 += sum[prev];
    s1_2 += sum_sq[prev];
    const double n2 = total_n - n1;
    if (n1 == 0.0 || n2 == 0.0) continue;
    const double s2 = total_s - s1;
    const double s2_2 = total_s2 - s1_2;
    // Q1 s1^2 + Q2 s2^2 with Q = n / N and s^2 = sum_sq / n - mean^2
    const double within = ((s1_2 - s1 * s1 / n1) + (s2_2 - s2 * s2 / n2)) / total_n;
    if (!best || within < best_within) {
      best = k;
      best_within = within;
    }
  }

  if (!best) {
    out.threshold = static_cast<double>(grid.maxCoeff());
    return out;
  }
  out.threshold = static_cast<double>(*best) / bins;
  out.mask = (grid.template cast<double>().array() > out.threshold).matrix();
  return out;
}

inline ThresholdMask otsu_threshold(const IntensityGrid &grid, int bins = kDefaultHistogramBins) {
  return otsu_threshold(grid.values, bins);
}

struct VelocityRange {
  double velocity;  // m/s
  double range;     // m
};

/// Subtracts the instant's mean range from every range; velocities pass
/// through.
std::vector<VelocityRange> mean_free_range(std::span<const VelocityRange> samples);

}  // namespace mdl

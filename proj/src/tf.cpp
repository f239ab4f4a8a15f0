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

#include "mdl/tf.hpp"

#include <complex>

#include <unsupported/Eigen/FFT>

namespace mdl {

namespace {

// Eigen::FFT caches twiddles internally and is not safe to share.
Eigen::FFT<double> &thread_fft() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

// Forward transform with the zero frequency moved to index n / 2.
Eigen::VectorXcd fft_shifted(const Eigen::VectorXcd &in) {
  Eigen::VectorXcd spectrum(in.size());
  thread_fft().fwd(spectrum, in);
  const Eigen::Index n = in.size();
  const Eigen::Index half = n / 2;
  Eigen::VectorXcd shifted(n);
  shifted.tail(n - half) = spectrum.head(n - half);
  shifted.head(half) = spectrum.tail(half);
  return shifted;
}

double power_db(const std::complex<double> &z) {
  const double mag = std::max(std::abs(z), kMagnitudeFloor);
  return 20.0 * std::log10(mag);
}

}  // namespace

Spectrogram stft_spectrogram(const Eigen::VectorXcd &x, double sample_rate,
                             const StftParams &params,
                             std::optional<double> carrier_frequency) {
  if (x.size() == 0) throw DataError("stft_spectrogram: empty signal");
  const Eigen::Index len = params.window_len;
  if (len < 2 || len > x.size())
    throw ConfigError("stft window length must be in [2, signal length]");
  if (params.hop < 1) throw ConfigError("stft hop must be >= 1");
  if (!(params.sigma > 0.0)) throw ConfigError("stft window sigma must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");

  const double centre = 0.5 * static_cast<double>(len - 1);
  const Eigen::ArrayXd n = Eigen::ArrayXd::LinSpaced(len, 0.0, static_cast<double>(len - 1));
  const Eigen::ArrayXd window = (-0.5 * ((n - centre) / params.sigma).square()).exp();

  const Eigen::Index columns = (x.size() - 1) / params.hop + 1;
  Spectrogram s;
  s.window_len = len;
  s.hop = params.hop;
  s.db.resize(len, columns);
  s.time_axis.resize(columns);
  Eigen::VectorXcd segment(len);
  for (Eigen::Index c = 0; c < columns; ++c) {
    const Eigen::Index mid = c * params.hop;
    const Eigen::Index first = mid - len / 2;
    for (Eigen::Index k = 0; k < len; ++k) {
      const Eigen::Index idx = first + k;
      segment(k) = (idx >= 0 && idx < x.size()) ? x(idx) * window(k) : std::complex<double>{};
    }
    const Eigen::VectorXcd spectrum = fft_shifted(segment);
    for (Eigen::Index k = 0; k < len; ++k) s.db(k, c) = power_db(spectrum(k));
    s.time_axis(c) = static_cast<double>(mid) / sample_rate;
  }
  s.doppler_axis =
      (Eigen::ArrayXd::LinSpaced(len, 0.0, static_cast<double>(len - 1)) - static_cast<double>(len / 2)) *
      (sample_rate / static_cast<double>(len));
  if (carrier_frequency) {
    s.velocity_axis.resize(len);
    for (Eigen::Index k = 0; k < len; ++k)
      s.velocity_axis(k) = doppler_to_velocity(s.doppler_axis(k), *carrier_frequency);
  }
  return s;
}

RangeDopplerMap range_doppler_map(const Eigen::MatrixXcd &data, const RadarConfig &config,
                                  double frame_time) {
  if (data.rows() != config.samples_per_chirp || data.cols() != config.chirps_per_frame)
    throw DataError("frame dimensions do not match the radar configuration");
  if (!data.allFinite()) throw DataError("frame has non-finite entries");
  const Eigen::Index rows = data.rows();
  const Eigen::Index cols = data.cols();

  RangeDopplerMap map;
  map.frame_time = frame_time;
  map.db.resize(rows, cols);
  Eigen::VectorXcd row(cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    row = data.row(i).transpose();
    const Eigen::VectorXcd spectrum = fft_shifted(row);
    for (Eigen::Index j = 0; j < cols; ++j) map.db(i, j) = power_db(spectrum(j));
  }
  map.range_axis = Eigen::VectorXd::LinSpaced(rows, 0.0, static_cast<double>(rows - 1)) *
                   config.range_resolution();
  map.velocity_axis.resize(cols);
  const double bin_hz = 1.0 / config.frame_duration();
  for (Eigen::Index j = 0; j < cols; ++j)
    map.velocity_axis(j) =
        doppler_to_velocity(static_cast<double>(j - cols / 2) * bin_hz, config.carrier_frequency);
  return map;
}

RangeDopplerMap range_doppler_map(const ChirpFrame &frame) {
  return range_doppler_map(frame.data, frame.config, frame.start_time);
}

std::vector<VelocityRange> mean_free_range(std::span<const VelocityRange> samples) {
  if (samples.empty()) throw DataError("mean_free_range: no samples");
  double mean = 0.0;
  for (const auto &s : samples) mean += s.range;
  mean /= static_cast<double>(samples.size());
  std::vector<VelocityRange> out;
  out.reserve(samples.size());
  for (const auto &s : samples) out.push_back({s.velocity, s.range - mean});
  return out;
}

}  // namespace mdl

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

#include "mdl/pipeline.hpp"

#include <cmath>
#include <random>

#include "mdl/error.hpp"

namespace mdl {

void ProcessingConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
  if (histogram_bins < 2) throw ConfigError("histogram bins must be >= 2");
  if (!std::isfinite(dynamic_range_db)) throw ConfigError("dynamic range must be finite");
  if (stft.window_len < 2 || stft.hop < 1 || !(stft.sigma > 0.0))
    throw ConfigError("invalid STFT parameters");
}

ThresholdMask detection_mask(const RangeDopplerMap &map, const ProcessingConfig &config) {
  if (!config.threshold) {
    const double floor_db = 20.0 * std::log10(kMagnitudeFloor);
    return {(map.db.array() > floor_db + 1e-9).matrix(), floor_db};
  }
  const auto clipped = clip_dynamic_range(map.db, config.dynamic_range_db);
  const auto unit = normalize_to_unit(clipped);
  return otsu_threshold(gamma_transform(unit, config.gamma), config.histogram_bins);
}

ProcessedFrame process_frame(const ChirpFrame &frame, std::size_t frame_index,
                             const ProcessingConfig &config) {
  ProcessedFrame out;
  out.map = range_doppler_map(frame);
  out.mask = detection_mask(out.map, config);
  out.samples = extract_features(out.mask, out.map, frame_index);
  return out;
}

std::vector<FeatureSample> label_from_trajectory(std::span<const FeatureSample> samples,
                                                 const Trajectory &traj, const ShapeTable &shapes,
                                                 const RadarConfig &radar, double frame_start) {
  if (samples.empty()) return {};
  const auto frames = synth_segment_frames(traj, shapes, radar, frame_start);
  std::array<RangeDopplerMap, kSegmentCount> maps;
  std::array<SegmentMap, kSegmentCount> refs;
  for (std::size_t s = 0; s < kSegmentCount; ++s) {
    maps[s] = range_doppler_map(frames[s], radar, frame_start);
    refs[s] = {segment_at(s), &maps[s]};
  }
  return label_features(samples, refs);
}

std::vector<FeatureSample> labeled_frame_features(const Trajectory &traj, const ShapeTable &shapes,
                                                  const RadarConfig &radar,
                                                  const ProcessingConfig &config,
                                                  double frame_start, std::size_t frame_index) {
  const auto frame = synth_frame(traj, shapes, radar, frame_start, all_segments());
  const auto processed = process_frame(frame, frame_index, config);
  return label_from_trajectory(processed.samples, traj, shapes, radar, frame_start);
}

std::vector<FeatureSample> labeled_walk_features(const Trajectory &traj, const ShapeTable &shapes,
                                                 const RadarConfig &radar,
                                                 const ProcessingConfig &config,
                                                 std::size_t first_frame_index) {
  std::vector<FeatureSample> out;
  const auto n = frame_count(traj, radar);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double start = traj.start_time() + static_cast<double>(k) * radar.frame_duration();
    auto samples = labeled_frame_features(traj, shapes, radar, config, start,
                                          first_frame_index + static_cast<std::size_t>(k));
    out.insert(out.end(), samples.begin(), samples.end());
  }
  return out;
}

double approach_duration(const GaitConfig &gait, const RadarConfig &radar, double min_distance) {
  Vec3 offset = gait.start_position - radar.radar_position;
  offset.z() = 0.0;
  Vec3 heading = gait.heading;
  heading.z() = 0.0;
  const double along = -offset.dot(heading.normalized());
  const double travel = along - min_distance;
  if (!(travel > 0.0))
    throw ConfigError("subject does not approach the radar beyond the minimum distance");
  return travel / gait.relative_velocity;
}

std::vector<GaitConfig> training_subjects(std::size_t count, std::uint64_t seed,
                                          const RadarConfig &radar) {
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  std::vector<GaitConfig> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    GaitConfig g;
    g.subject_height = uniform(1.6, 1.9);
    g.relative_velocity = uniform(1.0, 1.5);
    const double start = std::min(uniform(8.0, 10.0), radar.max_range - 1.0);
    g.start_position = Vec3(radar.radar_position.x() + start, uniform(-0.3, 0.3), 0.0);
    g.heading = Vec3(-1.0, 0.0, 0.0);
    g.random_seed = rng();
    out.push_back(g);
  }
  return out;
}

StreamDecomposer::StreamDecomposer(const DecisionTree &tree, ProcessingConfig config,
                                   int median_order)
    : tree_(&tree), config_(config), order_(median_order), filter_(median_order) {
  config_.validate();
}

std::vector<EnvelopeEmission> StreamDecomposer::push(const ChirpFrame &frame) {
  const std::size_t index = times_.size();
  FrameEnvelopes raw;
  try {
    const auto processed = process_frame(frame, index, config_);
    const auto classes = tree_->predict(processed.samples);
    raw = class_envelopes(processed.samples, classes);
  } catch (const Error &e) {
    throw FrameError(e, index);
  }
  times_.push_back(frame.start_time);
  std::vector<EnvelopeEmission> out;
  out.push_back({index, frame.start_time, raw, false});
  if (const auto f = filter_.push(raw)) out.push_back({f->index, times_[f->index], f->envelopes, true});
  return out;
}

std::vector<EnvelopeEmission> StreamDecomposer::flush() {
  std::vector<EnvelopeEmission> out;
  for (const auto &f : filter_.flush()) out.push_back({f.index, times_[f.index], f.envelopes, true});
  return out;
}

}  // namespace mdl

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

#include <cstdint>
#include <optional>
#include <vector>

#include "mdl/body.hpp"
#include "mdl/envelope.hpp"
#include "mdl/features.hpp"
#include "mdl/gait.hpp"
#include "mdl/radar.hpp"
#include "mdl/tf.hpp"
#include "mdl/tree.hpp"

namespace mdl {

struct ProcessingConfig {
  double gamma = kDefaultGamma;
  int histogram_bins = kDefaultHistogramBins;
  // Cells more than this far below the frame peak are clipped before
  // normalization; <= 0 disables the clip.
  double dynamic_range_db = 20.0;
  // When false every cell above the magnitude floor is a detection.
  bool threshold = true;
  StftParams stft;

  void validate() const;
};

/// Detection mask of one map: clip, normalize, gamma, Otsu.
ThresholdMask detection_mask(const RangeDopplerMap &map, const ProcessingConfig &config);

struct ProcessedFrame {
  RangeDopplerMap map;
  ThresholdMask mask;
  std::vector<FeatureSample> samples;  // unlabelled
};

ProcessedFrame process_frame(const ChirpFrame &frame, std::size_t frame_index,
                             const ProcessingConfig &config);

/// Processes the noise-free sum of the per-segment returns at `frame_start`
/// (plus noise when the radar config has an SNR) and labels the samples from
/// the per-segment maps.
std::vector<FeatureSample> labeled_frame_features(const Trajectory &traj, const ShapeTable &shapes,
                                                  const RadarConfig &radar,
                                                  const ProcessingConfig &config,
                                                  double frame_start, std::size_t frame_index);

/// Labels samples extracted from an existing frame by re-synthesizing the
/// per-segment returns of the same instant.
std::vector<FeatureSample> label_from_trajectory(std::span<const FeatureSample> samples,
                                                 const Trajectory &traj, const ShapeTable &shapes,
                                                 const RadarConfig &radar, double frame_start);

/// Labelled samples of every whole frame in the trajectory.
std::vector<FeatureSample> labeled_walk_features(const Trajectory &traj, const ShapeTable &shapes,
                                                 const RadarConfig &radar,
                                                 const ProcessingConfig &config,
                                                 std::size_t first_frame_index = 0);

/// Walking subjects for building a training set: heights, speeds, gait
/// phases and start distances vary with `seed`.
std::vector<GaitConfig> training_subjects(std::size_t count, std::uint64_t seed,
                                          const RadarConfig &radar);

/// Walk duration that keeps a subject starting at `start` in front of the
/// radar and beyond `min_distance` of it.
double approach_duration(const GaitConfig &gait, const RadarConfig &radar, double min_distance = 2.0);

/// Per-frame output of the streaming decomposer.
struct EnvelopeEmission {
  std::size_t frame_index;
  double time;
  FrameEnvelopes envelopes;
  bool filtered;
};

/// map -> mask -> features -> prediction -> envelopes -> causal median.
/// Each push returns the raw envelopes of the new frame and, once the
/// window is full, the filtered envelopes of the frame order/2 earlier.
class StreamDecomposer {
 public:
  StreamDecomposer(const DecisionTree &tree, ProcessingConfig config,
                   int median_order = kDefaultMedianOrder);

  std::vector<EnvelopeEmission> push(const ChirpFrame &frame);
  std::vector<EnvelopeEmission> flush();

  std::size_t frames_pushed() const { return times_.size(); }
  /// Frames between arrival and filtered emission.
  std::size_t latency_frames() const { return static_cast<std::size_t>(order_ / 2); }

 private:
  const DecisionTree *tree_;
  ProcessingConfig config_;
  int order_;
  StreamingEnvelopeFilter filter_;
  std::vector<double> times_;
};

}  // namespace mdl

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
#include <span>
#include <utility>
#include <vector>

#include "mdl/body.hpp"
#include "mdl/tf.hpp"

namespace mdl {

/// One detected cell: micro-Doppler velocity and mean-free micro-range.
struct FeatureSample {
  std::size_t frame_index = 0;
  double velocity = 0.0;         // m/s
  double mean_free_range = 0.0;  // m
  std::optional<LimbClass> label;
  // Source cell in the range-Doppler map; not serialized.
  Eigen::Index range_bin = -1;
  Eigen::Index doppler_bin = -1;

  bool operator==(const FeatureSample &) const = default;
};

/// One sample per true mask cell (range-major order), with the frame's mean
/// range removed. An all-false mask gives an empty list.
std::vector<FeatureSample> extract_features(const ThresholdMask &mask, const RangeDopplerMap &map,
                                            std::size_t frame_index);

/// Map of a single segment, for ground-truth attribution.
struct SegmentMap {
  SegmentId segment;
  const RangeDopplerMap *map;
};

/// Labels each sample with the class of the segment whose map is strongest
/// at the sample's cell. Every segment must appear exactly once; ties go to
/// the segment declared first in SegmentId, independent of argument order.
std::vector<FeatureSample> label_features(std::span<const FeatureSample> samples,
                                          std::span<const SegmentMap> maps);

/// Seeded uniform shuffle, then the first ceil(train_fraction * n) samples
/// go to training.
std::pair<std::vector<FeatureSample>, std::vector<FeatureSample>> split_dataset(
    std::span<const FeatureSample> samples, double train_fraction = 0.75,
    std::uint64_t seed = 0);

}  // namespace mdl

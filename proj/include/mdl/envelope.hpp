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
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "mdl/body.hpp"
#include "mdl/features.hpp"

namespace mdl {

struct Envelope {
  double max;  // m/s
  double min;  // m/s

  bool operator==(const Envelope &) const = default;
};

/// Per-class envelope of one frame; absent classes are nullopt.
using FrameEnvelopes = std::array<std::optional<Envelope>, kLimbClassCount>;

/// Envelopes from each sample's label. Unlabelled samples are an error.
FrameEnvelopes class_envelopes(std::span<const FeatureSample> samples);

/// Envelopes from separately supplied classes (e.g. predictions).
FrameEnvelopes class_envelopes(std::span<const FeatureSample> samples,
                               std::span<const LimbClass> classes);

inline constexpr int kDefaultMedianOrder = 9;

/// Centred sliding median with edge replication. Missing entries are
/// linearly interpolated from the nearest present neighbours (held constant
/// past the first/last present value), filtered, then reported missing again.
std::vector<std::optional<double>> median_filter(std::span<const std::optional<double>> series,
                                                 int order = kDefaultMedianOrder);

/// Filters every class's max and min series independently.
std::vector<FrameEnvelopes> median_filter(std::span<const FrameEnvelopes> track,
                                          int order = kDefaultMedianOrder);

/// Causal form of median_filter. Value k is emitted once value k + order/2
/// has been pushed; flush() emits the tail with right-edge replication.
/// Interpolation only sees values already pushed, so a gap still open at the
/// newest value is bridged by holding the last present value.
class StreamingMedian {
 public:
  explicit StreamingMedian(int order = kDefaultMedianOrder);

  struct Emission {
    std::size_t index;
    std::optional<double> value;
  };

  std::optional<Emission> push(std::optional<double> value);
  std::vector<Emission> flush();

  int order() const { return order_; }
  std::size_t pushed() const { return next_index_; }
  std::size_t emitted() const { return next_emit_; }

 private:
  std::optional<double> interpolated(std::size_t index) const;
  Emission emit(std::size_t index);

  int order_;
  std::size_t half_;
  std::size_t next_index_ = 0;
  std::size_t next_emit_ = 0;
  std::size_t first_kept_ = 0;  // index of buffer_.front()
  std::deque<std::optional<double>> buffer_;
  std::optional<std::pair<std::size_t, double>> last_dropped_present_;
};

/// Streaming median over all eight envelope series of a frame.
class StreamingEnvelopeFilter {
 public:
  explicit StreamingEnvelopeFilter(int order = kDefaultMedianOrder);

  struct Emission {
    std::size_t index;
    FrameEnvelopes envelopes;
  };

  std::optional<Emission> push(const FrameEnvelopes &raw);
  std::vector<Emission> flush();

 private:
  std::array<StreamingMedian, kLimbClassCount> max_;
  std::array<StreamingMedian, kLimbClassCount> min_;
};

/// Min/max envelopes relabelled as two sides by swapping them every half
/// gait cycle: during even half-cycles (counted from `origin`) side A is the
/// max envelope, during odd ones the min.
struct SideEnvelopes {
  std::array<std::optional<double>, kLimbClassCount> side_a;
  std::array<std::optional<double>, kLimbClassCount> side_b;
};

std::vector<SideEnvelopes> disambiguate_sides(std::span<const FrameEnvelopes> track,
                                              std::span<const double> times, double half_cycle,
                                              double origin = 0.0);

}  // namespace mdl

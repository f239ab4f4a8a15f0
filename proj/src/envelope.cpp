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

#include "mdl/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdl/error.hpp"

namespace mdl {

namespace {

void check_order(int order) {
  if (order < 1 || order % 2 == 0)
    throw ConfigError("median filter order must be odd and >= 1, got " + std::to_string(order));
}

double median_of(std::vector<double> &w) {
  const auto mid = w.begin() + static_cast<std::ptrdiff_t>(w.size() / 2);
  std::nth_element(w.begin(), mid, w.end());
  return *mid;
}

double lerp_at(std::size_t i0, double v0, std::size_t i1, double v1, std::size_t i) {
  const double f = static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
  return v0 + f * (v1 - v0);
}

}  // namespace

FrameEnvelopes class_envelopes(std::span<const FeatureSample> samples) {
  std::vector<LimbClass> classes;
  classes.reserve(samples.size());
  for (const auto &s : samples) {
    if (!s.label) throw DataError("class_envelopes: sample without a label");
    classes.push_back(*s.label);
  }
  return class_envelopes(samples, classes);
}

FrameEnvelopes class_envelopes(std::span<const FeatureSample> samples,
                               std::span<const LimbClass> classes) {
  if (samples.size() != classes.size())
    throw DataError("class_envelopes: sample and class counts differ");
  FrameEnvelopes out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto &e = out[static_cast<std::size_t>(classes[i])];
    const double v = samples[i].velocity;
    if (!e) {
      e = Envelope{v, v};
    } else {
      e->max = std::max(e->max, v);
      e->min = std::min(e->min, v);
    }
  }
  return out;
}

std::vector<std::optional<double>> median_filter(std::span<const std::optional<double>> series,
                                                 int order) {
  check_order(order);
  const std::size_t n = series.size();
  std::vector<std::optional<double>> out(n);
  if (n == 0) return out;

  // Fill gaps from the nearest present neighbours on each side.
  std::vector<std::optional<double>> filled(series.begin(), series.end());
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < n; ++i) {
    if (!series[i]) continue;
    if (prev && i > *prev + 1)
      for (std::size_t m = *prev + 1; m < i; ++m)
        filled[m] = lerp_at(*prev, *series[*prev], i, *series[i], m);
    else if (!prev)
      for (std::size_t m = 0; m < i; ++m) filled[m] = series[i];
    prev = i;
  }
  if (!prev) return out;
  for (std::size_t m = *prev + 1; m < n; ++m) filled[m] = series[*prev];

  const auto half = static_cast<std::ptrdiff_t>(order / 2);
  const auto last = static_cast<std::ptrdiff_t>(n - 1);
  std::vector<double> window(static_cast<std::size_t>(order));
  for (std::size_t i = 0; i < n; ++i) {
    if (!series[i]) continue;
    for (std::ptrdiff_t d = -half; d <= half; ++d) {
      const auto j = std::clamp(static_cast<std::ptrdiff_t>(i) + d, std::ptrdiff_t{0}, last);
      window[static_cast<std::size_t>(d + half)] = *filled[static_cast<std::size_t>(j)];
    }
    out[i] = median_of(window);
  }
  return out;
}

std::vector<FrameEnvelopes> median_filter(std::span<const FrameEnvelopes> track, int order) {
  check_order(order);
  std::vector<FrameEnvelopes> out(track.size());
  std::vector<std::optional<double>> series(track.size());
  for (std::size_t c = 0; c < kLimbClassCount; ++c) {
    for (int which = 0; which < 2; ++which) {
      for (std::size_t k = 0; k < track.size(); ++k) {
        const auto &e = track[k][c];
        series[k] = e ? std::optional<double>(which == 0 ? e->max : e->min) : std::nullopt;
      }
      const auto filtered = median_filter(series, order);
      for (std::size_t k = 0; k < track.size(); ++k) {
        if (!filtered[k]) continue;
        auto &e = out[k][c];
        if (!e) e = Envelope{0.0, 0.0};
        (which == 0 ? e->max : e->min) = *filtered[k];
      }
    }
  }
  return out;
}

StreamingMedian::StreamingMedian(int order) : order_(order) {
  check_order(order);
  half_ = static_cast<std::size_t>(order / 2);
}

std::optional<double> StreamingMedian::interpolated(std::size_t index) const {
  const auto &raw = buffer_[index - first_kept_];
  if (raw) return raw;
  std::optional<std::pair<std::size_t, double>> before = last_dropped_present_;
  for (std::size_t m = index; m-- > first_kept_;)
    if (buffer_[m - first_kept_]) {
      before = std::make_pair(m, *buffer_[m - first_kept_]);
      break;
    }
  std::optional<std::pair<std::size_t, double>> after;
  for (std::size_t m = index + 1; m < next_index_; ++m)
    if (buffer_[m - first_kept_]) {
      after = std::make_pair(m, *buffer_[m - first_kept_]);
      break;
    }
  if (before && after) return lerp_at(before->first, before->second, after->first, after->second, index);
  if (before) return before->second;
  if (after) return after->second;
  return std::nullopt;
}

StreamingMedian::Emission StreamingMedian::emit(std::size_t index) {
  Emission e{index, std::nullopt};
  if (buffer_[index - first_kept_]) {
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(order_));
    const auto last = static_cast<std::ptrdiff_t>(next_index_ - 1);
    const auto h = static_cast<std::ptrdiff_t>(half_);
    for (std::ptrdiff_t d = -h; d <= h; ++d) {
      const auto j = std::clamp(static_cast<std::ptrdiff_t>(index) + d, std::ptrdiff_t{0}, last);
      window.push_back(*interpolated(static_cast<std::size_t>(j)));
    }
    e.value = median_of(window);
  }
  next_emit_ = index + 1;
  while (first_kept_ + half_ < next_emit_) {
    if (buffer_.front()) last_dropped_present_ = std::make_pair(first_kept_, *buffer_.front());
    buffer_.pop_front();
    ++first_kept_;
  }
  return e;
}

std::optional<StreamingMedian::Emission> StreamingMedian::push(std::optional<double> value) {
  buffer_.push_back(value);
  ++next_index_;
  if (next_index_ > next_emit_ + half_) return emit(next_emit_);
  return std::nullopt;
}

std::vector<StreamingMedian::Emission> StreamingMedian::flush() {
  std::vector<Emission> out;
  while (next_emit_ < next_index_) out.push_back(emit(next_emit_));
  return out;
}

StreamingEnvelopeFilter::StreamingEnvelopeFilter(int order)
    : max_{StreamingMedian(order), StreamingMedian(order), StreamingMedian(order),
           StreamingMedian(order)},
      min_{StreamingMedian(order), StreamingMedian(order), StreamingMedian(order),
           StreamingMedian(order)} {}

namespace {

FrameEnvelopes combine(const std::array<std::optional<double>, kLimbClassCount> &hi,
                       const std::array<std::optional<double>, kLimbClassCount> &lo) {
  FrameEnvelopes out;
  for (std::size_t c = 0; c < kLimbClassCount; ++c)
    if (hi[c] && lo[c]) out[c] = Envelope{*hi[c], *lo[c]};
  return out;
}

}  // namespace

std::optional<StreamingEnvelopeFilter::Emission> StreamingEnvelopeFilter::push(
    const FrameEnvelopes &raw) {
  std::array<std::optional<double>, kLimbClassCount> hi, lo;
  std::optional<std::size_t> index;
  for (std::size_t c = 0; c < kLimbClassCount; ++c) {
    const auto &e = raw[c];
    const auto a = max_[c].push(e ? std::optional<double>(e->max) : std::nullopt);
    const auto b = min_[c].push(e ? std::optional<double>(e->min) : std::nullopt);
    if (a) {
      index = a->index;
      hi[c] = a->value;
      lo[c] = b->value;
    }
  }
  if (!index) return std::nullopt;
  return Emission{*index, combine(hi, lo)};
}

std::vector<StreamingEnvelopeFilter::Emission> StreamingEnvelopeFilter::flush() {
  std::array<std::vector<StreamingMedian::Emission>, kLimbClassCount> hi, lo;
  for (std::size_t c = 0; c < kLimbClassCount; ++c) {
    hi[c] = max_[c].flush();
    lo[c] = min_[c].flush();
  }
  std::vector<Emission> out;
  for (std::size_t k = 0; k < hi[0].size(); ++k) {
    std::array<std::optional<double>, kLimbClassCount> a, b;
    for (std::size_t c = 0; c < kLimbClassCount; ++c) {
      a[c] = hi[c][k].value;
      b[c] = lo[c][k].value;
    }
    out.push_back({hi[0][k].index, combine(a, b)});
  }
  return out;
}

std::vector<SideEnvelopes> disambiguate_sides(std::span<const FrameEnvelopes> track,
                                              std::span<const double> times, double half_cycle,
                                              double origin) {
  if (!(half_cycle > 0.0) || !std::isfinite(half_cycle))
    throw ConfigError("half-cycle duration must be positive");
  if (track.size() != times.size())
    throw DataError("disambiguate_sides: track and time lengths differ");
  std::vector<SideEnvelopes> out(track.size());
  for (std::size_t k = 0; k < track.size(); ++k) {
    const auto half_index = static_cast<long long>(std::floor((times[k] - origin) / half_cycle));
    const bool even = half_index % 2 == 0;
    for (std::size_t c = 0; c < kLimbClassCount; ++c) {
      const auto &e = track[k][c];
      if (!e) continue;
      out[k].side_a[c] = even ? e->max : e->min;
      out[k].side_b[c] = even ? e->min : e->max;
    }
  }
  return out;
}

}  // namespace mdl

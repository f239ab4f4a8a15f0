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

#include "mdl/features.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace mdl {

std::vector<FeatureSample> extract_features(const ThresholdMask &mask, const RangeDopplerMap &map,
                                            std::size_t frame_index) {
  if (mask.mask.rows() != map.db.rows() || mask.mask.cols() != map.db.cols())
    throw DataError("mask and map dimensions differ");
  std::vector<VelocityRange> raw;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  for (Eigen::Index i = 0; i < mask.mask.rows(); ++i) {
    for (Eigen::Index j = 0; j < mask.mask.cols(); ++j) {
      if (!mask.mask(i, j)) continue;
      raw.push_back({map.velocity_axis(j), map.range_axis(i)});
      cells.emplace_back(i, j);
    }
  }
  std::vector<FeatureSample> out;
  if (raw.empty()) return out;
  const auto centred = mean_free_range(raw);
  out.reserve(centred.size());
  for (std::size_t k = 0; k < centred.size(); ++k) {
    FeatureSample s;
    s.frame_index = frame_index;
    s.velocity = centred[k].velocity;
    s.mean_free_range = centred[k].range;
    s.range_bin = cells[k].first;
    s.doppler_bin = cells[k].second;
    out.push_back(s);
  }
  return out;
}

std::vector<FeatureSample> label_features(std::span<const FeatureSample> samples,
                                          std::span<const SegmentMap> maps) {
  std::array<const RangeDopplerMap *, kSegmentCount> by_segment{};
  for (const auto &m : maps) {
    if (m.map == nullptr) throw DataError("label_features: null segment map");
    auto &slot = by_segment[index_of(m.segment)];
    if (slot != nullptr)
      throw DataError("label_features: segment " + std::string(segment_name(m.segment)) +
                      " given twice");
    slot = m.map;
  }
  for (std::size_t s = 0; s < kSegmentCount; ++s)
    if (by_segment[s] == nullptr)
      throw DataError("label_features: missing map for segment " +
                      std::string(segment_name(segment_at(s))));
  const auto rows = by_segment[0]->db.rows();
  const auto cols = by_segment[0]->db.cols();
  for (const auto *m : by_segment)
    if (m->db.rows() != rows || m->db.cols() != cols)
      throw DataError("label_features: segment map dimensions differ");

  std::vector<FeatureSample> out(samples.begin(), samples.end());
  for (auto &s : out) {
    if (s.range_bin < 0 || s.range_bin >= rows || s.doppler_bin < 0 || s.doppler_bin >= cols)
      throw DataError("label_features: sample cell outside the segment maps");
    std::size_t best = 0;
    for (std::size_t k = 1; k < kSegmentCount; ++k)
      if (by_segment[k]->db(s.range_bin, s.doppler_bin) >
          by_segment[best]->db(s.range_bin, s.doppler_bin))
        best = k;
    s.label = limb_class_of(segment_at(best));
  }
  return out;
}

std::pair<std::vector<FeatureSample>, std::vector<FeatureSample>> split_dataset(
    std::span<const FeatureSample> samples, double train_fraction, std::uint64_t seed) {
  if (samples.size() < 4) throw DataError("split_dataset needs at least 4 samples");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train fraction must be in (0, 1)");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates with rejection sampling; std::uniform_int_distribution is
  // implementation defined, the engine is not.
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::uint64_t bound = i + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(order[i], order[static_cast<std::size_t>(r % bound)]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::ceil(train_fraction * static_cast<double>(samples.size()) - 1e-9));
  std::pair<std::vector<FeatureSample>, std::vector<FeatureSample>> out;
  out.first.reserve(n_train);
  out.second.reserve(samples.size() - n_train);
  for (std::size_t k = 0; k < order.size(); ++k)
    (k < n_train ? out.first : out.second).push_back(samples[order[k]]);
  return out;
}

}  // namespace mdl

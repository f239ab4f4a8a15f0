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
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "json.hpp"

#include "mdl/body.hpp"
#include "mdl/features.hpp"

namespace mdl {

enum class Feature : int { kVelocity = 0, kMeanFreeRange = 1 };
inline constexpr int kFeatureCount = 2;

inline double feature_value(const FeatureSample &s, Feature f) {
  return f == Feature::kVelocity ? s.velocity : s.mean_free_range;
}

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

struct TreeParams {
  int max_depth = 12;
  std::size_t min_samples_leaf = 20;
  std::uint64_t seed = 0;  // recorded for provenance; training is deterministic

  bool operator==(const TreeParams &) const = default;
};

using ClassCounts = std::array<std::uint64_t, kLimbClassCount>;

struct TreeNode {
  bool leaf = true;
  Feature feature = Feature::kVelocity;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  ClassCounts counts{};  // leaves only

  bool operator==(const TreeNode &) const = default;
};

inline constexpr int kTreeFormatVersion = 1;

/// CART classifier on (velocity, mean-free range) with Gini impurity.
/// Samples with value < threshold go left. Among equally good splits the
/// lowest feature index wins, then the lowest threshold. Leaf prediction is
/// the majority class, ties resolved in LimbClass order.
class DecisionTree {
 public:
  /// Every sample must be labelled; empty input is an error.
  static DecisionTree train(std::span<const FeatureSample> samples, const TreeParams &params = {});

  LimbClass predict(double velocity, double mean_free_range) const;
  LimbClass predict(const FeatureSample &s) const { return predict(s.velocity, s.mean_free_range); }
  std::vector<LimbClass> predict(std::span<const FeatureSample> samples) const;

  /// Index of the leaf reached by a sample.
  int leaf_for(double velocity, double mean_free_range) const;

  const std::vector<TreeNode> &nodes() const { return nodes_; }
  const TreeParams &params() const { return params_; }
  int depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json &j);
  void save(const std::string &path) const;
  static DecisionTree load(const std::string &path);

  bool operator==(const DecisionTree &) const = default;

 private:
  std::vector<TreeNode> nodes_;
  TreeParams params_;
};

}  // namespace mdl

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

#include "mdl/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>

#include "mdl/error.hpp"

namespace mdl {

namespace {

using Wide = __int128;

struct Candidate {
  Feature feature;
  double threshold;
  // Gini proxy sum_L c^2 / n_L + sum_R c^2 / n_R as an exact fraction.
  Wide num;
  Wide den;
};

bool better(const Candidate &a, const Candidate &b) { return a.num * b.den > b.num * a.den; }

Wide sum_squares(const ClassCounts &c) {
  Wide s = 0;
  for (auto v : c) s += static_cast<Wide>(v) * static_cast<Wide>(v);
  return s;
}

ClassCounts count_classes(std::span<const FeatureSample> samples,
                          const std::vector<std::size_t> &idx) {
  ClassCounts c{};
  for (auto i : idx) ++c[static_cast<std::size_t>(*samples[i].label)];
  return c;
}

bool is_pure(const ClassCounts &c) {
  return std::count_if(c.begin(), c.end(), [](auto v) { return v > 0; }) <= 1;
}

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m > a ? m : b;
}

std::optional<Candidate> best_split(std::span<const FeatureSample> samples,
                                    const std::vector<std::size_t> &idx, std::size_t min_leaf) {
  const std::size_t n = idx.size();
  std::optional<Candidate> best;
  std::vector<std::pair<double, std::size_t>> sorted(n);
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto feature = static_cast<Feature>(f);
    for (std::size_t k = 0; k < n; ++k)
      sorted[k] = {feature_value(samples[idx[k]], feature),
                   static_cast<std::size_t>(*samples[idx[k]].label)};
    std::sort(sorted.begin(), sorted.end());
    ClassCounts left{};
    ClassCounts right{};
    for (const auto &[v, c] : sorted) ++right[c];
    for (std::size_t p = 1; p < n; ++p) {
      const std::size_t c = sorted[p - 1].second;
      ++left[c];
      --right[c];
      if (p < min_leaf || n - p < min_leaf) continue;
      if (!(sorted[p - 1].first < sorted[p].first)) continue;
      const Wide nl = static_cast<Wide>(p);
      const Wide nr = static_cast<Wide>(n - p);
      Candidate cand{feature, midpoint(sorted[p - 1].first, sorted[p].first),
                     sum_squares(left) * nr + sum_squares(right) * nl, nl * nr};
      if (!best || better(cand, *best)) best = cand;
    }
  }
  return best;
}

struct Work {
  int node;
  std::vector<std::size_t> idx;
  int depth;
};

std::string feature_name(Feature f) {
  return f == Feature::kVelocity ? "velocity" : "mean_free_range";
}

Feature parse_feature(const nlohmann::json &j) {
  if (j.is_number_integer()) {
    const int v = j.get<int>();
    if (v < 0 || v >= kFeatureCount) throw DataError("tree json: feature index out of range");
    return static_cast<Feature>(v);
  }
  const auto s = j.get<std::string>();
  if (s == "velocity") return Feature::kVelocity;
  if (s == "mean_free_range") return Feature::kMeanFreeRange;
  throw DataError("tree json: unknown feature '" + s + "'");
}

}  // namespace

DecisionTree DecisionTree::train(std::span<const FeatureSample> samples, const TreeParams &params) {
  if (samples.empty()) throw DataError("cannot train a tree on an empty dataset");
  if (params.max_depth < 0) throw ConfigError("max_depth must be non-negative");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].label) throw DataError("training sample " + std::to_string(i) + " is unlabelled");
    if (!std::isfinite(samples[i].velocity) || !std::isfinite(samples[i].mean_free_range))
      throw DataError("training sample " + std::to_string(i) + " has non-finite features");
  }
  const std::size_t min_leaf = std::max<std::size_t>(params.min_samples_leaf, 1);

  DecisionTree tree;
  tree.params_ = params;
  std::vector<std::size_t> all(samples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  tree.nodes_.emplace_back();
  std::vector<Work> stack;
  stack.push_back({0, std::move(all), 0});
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    const ClassCounts counts = count_classes(samples, w.idx);
    std::optional<Candidate> split;
    if (w.depth < params.max_depth && !is_pure(counts) && w.idx.size() >= 2 * min_leaf)
      split = best_split(samples, w.idx, min_leaf);
    if (!split) {
      auto &leaf = tree.nodes_[static_cast<std::size_t>(w.node)];
      leaf.leaf = true;
      leaf.counts = counts;
      continue;
    }
    std::vector<std::size_t> left, right;
    for (auto i : w.idx)
      (feature_value(samples[i], split->feature) < split->threshold ? left : right).push_back(i);
    const int l = static_cast<int>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    tree.nodes_.emplace_back();
    auto &node = tree.nodes_[static_cast<std::size_t>(w.node)];
    node.leaf = false;
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = l;
    node.right = l + 1;
    stack.push_back({l + 1, std::move(right), w.depth + 1});
    stack.push_back({l, std::move(left), w.depth + 1});
  }
  return tree;
}

int DecisionTree::leaf_for(double velocity, double mean_free_range) const {
  if (nodes_.empty()) throw DataError("tree is empty");
  int k = 0;
  while (!nodes_[static_cast<std::size_t>(k)].leaf) {
    const auto &n = nodes_[static_cast<std::size_t>(k)];
    const double v = n.feature == Feature::kVelocity ? velocity : mean_free_range;
    k = v < n.threshold ? n.left : n.right;
  }
  return k;
}

LimbClass DecisionTree::predict(double velocity, double mean_free_range) const {
  const auto &counts = nodes_[static_cast<std::size_t>(leaf_for(velocity, mean_free_range))].counts;
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[best]) best = c;
  return limb_class_at(best);
}

std::vector<LimbClass> DecisionTree::predict(std::span<const FeatureSample> samples) const {
  std::vector<LimbClass> out;
  out.reserve(samples.size());
  for (const auto &s : samples) out.push_back(predict(s));
  return out;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  int deepest = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [k, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto &n = nodes_[static_cast<std::size_t>(k)];
    if (!n.leaf) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode &n) { return n.leaf; }));
}

nlohmann::json DecisionTree::to_json() const {
  nlohmann::json j;
  j["format_version"] = kTreeFormatVersion;
  j["features"] = {feature_name(Feature::kVelocity), feature_name(Feature::kMeanFreeRange)};
  nlohmann::json classes = nlohmann::json::array();
  for (auto c : kAllLimbClasses) classes.push_back(std::string(limb_class_name(c)));
  j["classes"] = classes;
  j["params"] = {
      {"max_depth", params_.max_depth == kUnlimitedDepth ? nlohmann::json(nullptr)
                                                          : nlohmann::json(params_.max_depth)},
      {"min_samples_leaf", params_.min_samples_leaf},
      {"seed", params_.seed}};
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto &n : nodes_) {
    if (n.leaf) {
      nlohmann::json counts = nlohmann::json::object();
      for (auto c : kAllLimbClasses)
        counts[std::string(limb_class_name(c))] = n.counts[static_cast<std::size_t>(c)];
      nodes.push_back({{"counts", counts}});
    } else {
      nodes.push_back({{"feature", feature_name(n.feature)},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right}});
    }
  }
  j["nodes"] = nodes;
  return j;
}

DecisionTree DecisionTree::from_json(const nlohmann::json &j) {
  try {
    if (!j.contains("format_version")) throw DataError("tree json: missing format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kTreeFormatVersion)
      throw DataError("tree json: unsupported format_version " + std::to_string(version) +
                      " (expected " + std::to_string(kTreeFormatVersion) + ")");
    DecisionTree tree;
    if (j.contains("params")) {
      const auto &p = j.at("params");
      if (p.contains("max_depth"))
        tree.params_.max_depth =
            p.at("max_depth").is_null() ? kUnlimitedDepth : p.at("max_depth").get<int>();
      if (p.contains("min_samples_leaf"))
        tree.params_.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
      if (p.contains("seed")) tree.params_.seed = p.at("seed").get<std::uint64_t>();
    }
    const auto &nodes = j.at("nodes");
    if (!nodes.is_array() || nodes.empty()) throw DataError("tree json: nodes must be a non-empty array");
    const int count = static_cast<int>(nodes.size());
    for (const auto &jn : nodes) {
      TreeNode n;
      if (jn.contains("counts")) {
        n.leaf = true;
        const auto &c = jn.at("counts");
        for (auto cls : kAllLimbClasses) {
          const std::string name(limb_class_name(cls));
          n.counts[static_cast<std::size_t>(cls)] = c.contains(name) ? c.at(name).get<std::uint64_t>() : 0;
        }
      } else {
        n.leaf = false;
        n.feature = parse_feature(jn.at("feature"));
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
        const int self = static_cast<int>(tree.nodes_.size());
        if (n.left <= self || n.right <= self || n.left >= count || n.right >= count)
          throw DataError("tree json: child index out of range at node " + std::to_string(self));
      }
      tree.nodes_.push_back(n);
    }
    return tree;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("tree json: ") + e.what());
  }
}

void DecisionTree::save(const std::string &path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json().dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

DecisionTree DecisionTree::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace mdl

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
#include <span>
#include <string>

#include <Eigen/Core>

#include "mdl/body.hpp"

namespace mdl {

/// Rows are true classes, columns predicted, both in LimbClass order.
struct ConfusionMatrix {
  Eigen::Matrix<std::uint64_t, kLimbClassCount, kLimbClassCount> counts =
      Eigen::Matrix<std::uint64_t, kLimbClassCount, kLimbClassCount>::Zero();

  void add(LimbClass truth, LimbClass predicted) {
    ++counts(static_cast<Eigen::Index>(truth), static_cast<Eigen::Index>(predicted));
  }
  std::uint64_t total() const { return counts.sum(); }
  std::uint64_t row_total(LimbClass truth) const {
    return counts.row(static_cast<Eigen::Index>(truth)).sum();
  }
  /// Row-normalized percentages; empty rows are zero.
  Eigen::Matrix4d percentages() const;
  double accuracy() const;
};

ConfusionMatrix confusion_matrix(std::span<const LimbClass> truth,
                                 std::span<const LimbClass> predicted);

/// Percentage table with rows and columns in Arms, Feet, Legs, Base order.
std::string format_confusion(const ConfusionMatrix &m);

/// CSV with header true_class,pred_class,count,percent in the same order.
std::string confusion_csv(const ConfusionMatrix &m);

}  // namespace mdl

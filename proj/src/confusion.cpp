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

#include "mdl/confusion.hpp"

#include <cstdio>
#include <sstream>

#include "mdl/error.hpp"
#include "mdl/strings.hpp"

namespace mdl {

Eigen::Matrix4d ConfusionMatrix::percentages() const {
  Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
  for (Eigen::Index r = 0; r < 4; ++r) {
    const auto total = counts.row(r).sum();
    if (total == 0) continue;
    for (Eigen::Index c = 0; c < 4; ++c)
      p(r, c) = 100.0 * static_cast<double>(counts(r, c)) / static_cast<double>(total);
  }
  return p;
}

double ConfusionMatrix::accuracy() const {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(counts.trace()) / static_cast<double>(n);
}

ConfusionMatrix confusion_matrix(std::span<const LimbClass> truth,
                                 std::span<const LimbClass> predicted) {
  if (truth.size() != predicted.size())
    throw DataError("confusion_matrix: truth and prediction lengths differ");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], predicted[i]);
  return m;
}

std::string format_confusion(const ConfusionMatrix &m) {
  const auto p = m.percentages();
  std::ostringstream out;
  char buf[32];
  out << "true\\pred";
  for (auto c : kReportOrder) {
    std::snprintf(buf, sizeof buf, "%9s", std::string(limb_class_name(c)).c_str());
    out << buf;
  }
  out << "        n\n";
  for (auto r : kReportOrder) {
    std::snprintf(buf, sizeof buf, "%-9s", std::string(limb_class_name(r)).c_str());
    out << buf;
    for (auto c : kReportOrder) {
      std::snprintf(buf, sizeof buf, "%8.2f%%",
                    p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%9llu", static_cast<unsigned long long>(m.row_total(r)));
    out << buf << '\n';
  }
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix &m) {
  const auto p = m.percentages();
  std::ostringstream out;
  out << "true_class,pred_class,count,percent\n";
  for (auto r : kReportOrder)
    for (auto c : kReportOrder) {
      const auto ri = static_cast<Eigen::Index>(r);
      const auto ci = static_cast<Eigen::Index>(c);
      out << limb_class_name(r) << ',' << limb_class_name(c) << ',' << m.counts(ri, ci) << ','
          << format_double(p(ri, ci)) << '\n';
    }
  return out.str();
}

}  // namespace mdl

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

#include "mdl/mocap.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "mdl/strings.hpp"

namespace mdl {

namespace {

std::optional<std::size_t> marker_index(std::string_view label) {
  for (std::size_t k = 0; k < kMarkerCount; ++k)
    if (kMarkerLabels[k] == label) return k;
  return std::nullopt;
}

// Marker feeding each non-hip segment, in SegmentId order.
constexpr std::array<std::string_view, kSegmentCount> kSegmentMarker = {
    "head",       "neck",       "torso",      "",
    "l_upperarm", "l_lowerarm", "l_hand",     "r_upperarm",
    "r_lowerarm", "r_hand",     "l_upperleg", "l_lowerleg",
    "l_foot",     "r_upperleg", "r_lowerleg", "r_foot",
};

double parse_number(std::string_view field, std::string_view source, std::size_t line) {
  const std::string text(trim(field));
  errno = 0;
  char *end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
    throw MocapError(MocapErrorKind::kParse, std::string(source) + ":" + std::to_string(line) +
                                                 ": cannot parse number '" + text + "'");
  return v;
}

}  // namespace

double MocapRecording::native_sample_rate() const {
  if (times.size() < 2) return 0.0;
  return static_cast<double>(times.size() - 1) / (times.back() - times.front());
}

MocapRecording parse_mocap(std::istream &in, std::string_view source_name) {
  const std::string source(source_name);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    for (auto f : split(t, ',')) header.emplace_back(trim(f));
    break;
  }
  if (header.empty())
    throw MocapError(MocapErrorKind::kParse, source + ": missing header row");
  if (header.front() != "time")
    throw MocapError(MocapErrorKind::kParse, source + ": first column must be 'time'");

  // column -> (marker, axis)
  std::vector<std::pair<std::size_t, int>> columns;
  std::array<std::array<bool, 3>, kMarkerCount> seen{};
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string &h = header[c];
    if (h.size() < 3 || h[h.size() - 2] != '_' || (h.back() != 'x' && h.back() != 'y' &&
                                                   h.back() != 'z'))
      throw MocapError(MocapErrorKind::kParse,
                       source + ": column '" + h + "' is not <marker>_x|y|z");
    const auto label = std::string_view(h).substr(0, h.size() - 2);
    const auto k = marker_index(label);
    if (!k)
      throw MocapError(MocapErrorKind::kUnknownMarker,
                       source + ": unknown marker '" + std::string(label) + "'");
    const int axis = h.back() - 'x';
    if (seen[*k][axis])
      throw MocapError(MocapErrorKind::kParse, source + ": duplicate column '" + h + "'");
    seen[*k][axis] = true;
    columns.emplace_back(*k, axis);
  }
  for (std::size_t k = 0; k < kMarkerCount; ++k) {
    for (int axis = 0; axis < 3; ++axis) {
      if (!seen[k][axis])
        throw MocapError(MocapErrorKind::kMissingMarker,
                         source + ": missing marker '" + std::string(kMarkerLabels[k]) +
                             "' (column " + std::string(kMarkerLabels[k]) + "_" +
                             static_cast<char>('x' + axis) + ")");
    }
  }

  std::vector<double> times;
  std::vector<std::array<double, 3 * kMarkerCount>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t, ',');
    if (fields.size() != header.size())
      throw MocapError(MocapErrorKind::kParse,
                       source + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    const double time = parse_number(fields[0], source, line_no);
    if (!times.empty() && !(time > times.back()))
      throw MocapError(MocapErrorKind::kNonMonotonicTime,
                       source + ":" + std::to_string(line_no) + ": non-monotonic time " +
                           std::string(fields[0]));
    std::array<double, 3 * kMarkerCount> row{};
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto [k, axis] = columns[c - 1];
      row[3 * k + axis] = parse_number(fields[c], source, line_no);
    }
    times.push_back(time);
    rows.push_back(row);
  }
  if (times.empty()) throw MocapError(MocapErrorKind::kParse, source + ": no samples");

  MocapRecording rec;
  rec.times = std::move(times);
  const auto n = static_cast<Eigen::Index>(rows.size());
  for (std::size_t k = 0; k < kMarkerCount; ++k) {
    rec.markers[k].resize(3, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int axis = 0; axis < 3; ++axis)
        rec.markers[k](axis, i) = rows[static_cast<std::size_t>(i)][3 * k + axis];
  }
  return rec;
}

MocapRecording load_mocap(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mocap file " + path.string());
  return parse_mocap(in, path.string());
}

void write_mocap(std::ostream &out, const MocapRecording &rec) {
  out << "time";
  for (auto label : kMarkerLabels)
    out << ',' << label << "_x," << label << "_y," << label << "_z";
  out << '\n';
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    out << format_double(rec.times[i]);
    for (const auto &m : rec.markers)
      for (int axis = 0; axis < 3; ++axis)
        out << ',' << format_double(m(axis, static_cast<Eigen::Index>(i)));
    out << '\n';
  }
}

Trajectory mocap_to_trajectory(const MocapRecording &rec, double target_rate) {
  if (!(target_rate > 0.0) || !std::isfinite(target_rate))
    throw ConfigError("target rate must be positive");
  const auto &times = rec.times;
  if (times.size() < 2 || times.back() - times.front() + 1e-12 < 1.0 / target_rate)
    throw DataError("mocap recording is shorter than one output step");

  const double t0 = times.front();
  const double span = times.back() - t0;
  const auto n = static_cast<Eigen::Index>(std::floor(span * target_rate + 1e-9)) + 1;

  // Interpolation weights are shared by all markers.
  std::vector<std::pair<Eigen::Index, double>> stencil(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) / target_rate;
    auto it = std::lower_bound(times.begin(), times.end(), t);
    Eigen::Index j;
    double w;
    const double tol = 1e-9 / target_rate;
    if (it != times.end() && std::abs(*it - t) <= tol) {
      j = it - times.begin();
      w = 0.0;
    } else if (it != times.begin() && std::abs(*(it - 1) - t) <= tol) {
      j = (it - times.begin()) - 1;
      w = 0.0;
    } else if (it == times.end()) {
      j = static_cast<Eigen::Index>(times.size()) - 1;
      w = 0.0;
    } else {
      j = (it - times.begin()) - 1;
      w = (t - times[static_cast<std::size_t>(j)]) /
          (times[static_cast<std::size_t>(j) + 1] - times[static_cast<std::size_t>(j)]);
    }
    stencil[static_cast<std::size_t>(i)] = {j, w};
  }

  const auto sample = [&](const Eigen::Matrix3Xd &m) {
    Eigen::Matrix3Xd out(3, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto [j, w] = stencil[static_cast<std::size_t>(i)];
      out.col(i) = w == 0.0 ? Eigen::Vector3d(m.col(j))
                            : Eigen::Vector3d((1.0 - w) * m.col(j) + w * m.col(j + 1));
    }
    return out;
  };

  Trajectory::Positions positions;
  for (SegmentId s : kAllSegments) {
    if (s == SegmentId::kHip) {
      const auto &l = rec.markers[*marker_index("l_hip")];
      const auto &r = rec.markers[*marker_index("r_hip")];
      positions[index_of(s)] = sample(0.5 * (l + r));
    } else {
      positions[index_of(s)] = sample(rec.markers[*marker_index(kSegmentMarker[index_of(s)])]);
    }
  }
  return Trajectory(t0, target_rate, std::move(positions));
}

MocapRecording trajectory_to_mocap(const Trajectory &traj, double hip_half_width) {
  MocapRecording rec;
  rec.times.resize(static_cast<std::size_t>(traj.size()));
  for (Eigen::Index i = 0; i < traj.size(); ++i)
    rec.times[static_cast<std::size_t>(i)] = traj.time_at(i);
  for (SegmentId s : kAllSegments) {
    if (s == SegmentId::kHip) {
      const Eigen::Vector3d off(0.0, hip_half_width, 0.0);
      rec.markers[*marker_index("l_hip")] = traj.positions(s).colwise() + off;
      rec.markers[*marker_index("r_hip")] = traj.positions(s).colwise() - off;
    } else {
      rec.markers[*marker_index(kSegmentMarker[index_of(s)])] = traj.positions(s);
    }
  }
  return rec;
}

}  // namespace mdl

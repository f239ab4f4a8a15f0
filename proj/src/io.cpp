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

#include "mdl/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdl/error.hpp"
#include "mdl/strings.hpp"

namespace mdl {

namespace {

void put_f32(std::string &buf, double v) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
  for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

float get_f32(const std::string &buf, std::size_t offset) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b)
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[offset + b])) << (8 * b);
  return std::bit_cast<float>(bits);
}

void write_bytes(const fs::path &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_bytes(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

void write_meta(const fs::path &binary, const nlohmann::json &meta) {
  write_text(meta_path(binary), meta.dump(2) + "\n");
}

nlohmann::json read_meta(const fs::path &binary) {
  const auto path = meta_path(binary);
  const auto text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

template <typename T>
T meta_field(const nlohmann::json &meta, const char *key, const fs::path &binary) {
  if (!meta.contains(key)) throw DataError(meta_path(binary).string() + ": missing '" + key + "'");
  try {
    return meta.at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw DataError(meta_path(binary).string() + ": bad value for '" + key + "'");
  }
}

std::vector<std::string_view> csv_fields(std::string_view line) {
  auto fields = split(line, ',');
  for (auto &f : fields) f = trim(f);
  return fields;
}

[[noreturn]] void csv_error(const fs::path &path, std::size_t line, const std::string &what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

fs::path meta_path(const fs::path &binary) {
  auto p = binary;
  p.replace_extension(".meta");
  return p;
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.bin", index);
  return buf;
}

void write_frame(const fs::path &path, const ChirpFrame &frame) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(frame.data.size()) * 8);
  for (Eigen::Index i = 0; i < frame.data.rows(); ++i)
    for (Eigen::Index j = 0; j < frame.data.cols(); ++j) {
      put_f32(bytes, frame.data(i, j).real());
      put_f32(bytes, frame.data(i, j).imag());
    }
  write_bytes(path, bytes);
  nlohmann::json meta;
  meta["N_s"] = frame.data.rows();
  meta["N_p"] = frame.data.cols();
  meta["T_p"] = frame.config.chirp_duration;
  meta["f_c"] = frame.config.carrier_frequency;
  meta["B"] = frame.config.bandwidth;
  meta["frame_start"] = frame.start_time;
  write_meta(path, meta);
}

ChirpFrame read_frame(const fs::path &path, const RadarConfig &base) {
  const auto meta = read_meta(path);
  ChirpFrame frame;
  frame.config = base;
  const auto rows = meta_field<Eigen::Index>(meta, "N_s", path);
  const auto cols = meta_field<Eigen::Index>(meta, "N_p", path);
  frame.config.samples_per_chirp = rows;
  frame.config.chirps_per_frame = cols;
  frame.config.chirp_duration = meta_field<double>(meta, "T_p", path);
  frame.config.carrier_frequency = meta_field<double>(meta, "f_c", path);
  frame.config.bandwidth = meta_field<double>(meta, "B", path);
  frame.start_time = meta_field<double>(meta, "frame_start", path);
  try {
    frame.config.validate();
  } catch (const ConfigError &e) {
    throw DataError(meta_path(path).string() + ": " + e.what());
  }
  const auto bytes = read_bytes(path);
  const auto expected = static_cast<std::size_t>(rows * cols) * 8;
  if (bytes.size() != expected)
    throw DataError(path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                    std::to_string(bytes.size()));
  frame.data.resize(rows, cols);
  std::size_t off = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j, off += 8)
      frame.data(i, j) = {get_f32(bytes, off), get_f32(bytes, off + 4)};
  if (!frame.data.allFinite()) throw DataError(path.string() + ": non-finite samples");
  return frame;
}

std::vector<fs::path> list_frames(const fs::path &dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<std::pair<std::uint64_t, fs::path>> found;
  for (const auto &entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() != 16 || !name.starts_with("frame_") || !name.ends_with(".bin")) continue;
    const auto index = parse_uint(std::string_view(name).substr(6, 6));
    if (!index) continue;
    found.emplace_back(*index, entry.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  out.reserve(found.size());
  for (auto &f : found) out.push_back(std::move(f.second));
  return out;
}

void write_matrix(const fs::path &path, const Eigen::MatrixXd &m, nlohmann::json meta) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 4);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_f32(bytes, m(i, j));
  write_bytes(path, bytes);
  meta["rows"] = m.rows();
  meta["cols"] = m.cols();
  meta["dtype"] = "float32";
  write_meta(path, meta);
}

Eigen::MatrixXd read_matrix(const fs::path &path) {
  const auto meta = read_meta(path);
  const auto rows = meta_field<Eigen::Index>(meta, "rows", path);
  const auto cols = meta_field<Eigen::Index>(meta, "cols", path);
  if (meta_field<std::string>(meta, "dtype", path) != "float32")
    throw DataError(meta_path(path).string() + ": dtype must be float32");
  const auto bytes = read_bytes(path);
  if (rows < 0 || cols < 0 || bytes.size() != static_cast<std::size_t>(rows * cols) * 4)
    throw DataError(path.string() + ": size does not match sidecar");
  Eigen::MatrixXd m(rows, cols);
  std::size_t off = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j, off += 4) m(i, j) = get_f32(bytes, off);
  return m;
}

void write_mask(const fs::path &path, const BoolMatrix &m, nlohmann::json meta) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) bytes.push_back(m(i, j) ? 1 : 0);
  write_bytes(path, bytes);
  meta["rows"] = m.rows();
  meta["cols"] = m.cols();
  meta["dtype"] = "uint8";
  write_meta(path, meta);
}

BoolMatrix read_mask(const fs::path &path) {
  const auto meta = read_meta(path);
  const auto rows = meta_field<Eigen::Index>(meta, "rows", path);
  const auto cols = meta_field<Eigen::Index>(meta, "cols", path);
  const auto bytes = read_bytes(path);
  if (rows < 0 || cols < 0 || bytes.size() != static_cast<std::size_t>(rows * cols))
    throw DataError(path.string() + ": size does not match sidecar");
  BoolMatrix m(rows, cols);
  std::size_t off = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = bytes[off++] != 0;
  return m;
}

void write_map(const fs::path &path, const RangeDopplerMap &map) {
  nlohmann::json meta;
  meta["frame_time"] = map.frame_time;
  meta["range_bin_m"] = map.range_axis.size() > 1 ? map.range_axis(1) - map.range_axis(0) : 0.0;
  meta["velocity_min_mps"] = map.velocity_axis.size() > 0 ? map.velocity_axis(0) : 0.0;
  meta["velocity_bin_mps"] =
      map.velocity_axis.size() > 1 ? map.velocity_axis(1) - map.velocity_axis(0) : 0.0;
  meta["unit"] = "dB";
  write_matrix(path, map.db, meta);
}

void write_features_csv(const fs::path &path, std::span<const FeatureSample> samples) {
  std::string text = "frame,velocity_mps,meanfree_range_m,label\n";
  for (const auto &s : samples) {
    text += std::to_string(s.frame_index);
    text += ',';
    text += format_double(s.velocity);
    text += ',';
    text += format_double(s.mean_free_range);
    text += ',';
    if (s.label) text += limb_class_name(*s.label);
    text += '\n';
  }
  write_text(path, text);
}

std::vector<FeatureSample> read_features_csv(const fs::path &path) {
  const auto text = read_text(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<FeatureSample> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = csv_fields(t);
    if (!header) {
      if (fields.size() != 4 || fields[0] != "frame" || fields[1] != "velocity_mps" ||
          fields[2] != "meanfree_range_m" || fields[3] != "label")
        csv_error(path, line_no, "expected header frame,velocity_mps,meanfree_range_m,label");
      header = true;
      continue;
    }
    if (fields.size() != 4) csv_error(path, line_no, "expected 4 fields");
    FeatureSample s;
    const auto frame = parse_uint(fields[0]);
    const auto v = parse_double(fields[1]);
    const auto r = parse_double(fields[2]);
    if (!frame || !v || !r) csv_error(path, line_no, "cannot parse numeric field");
    s.frame_index = static_cast<std::size_t>(*frame);
    s.velocity = *v;
    s.mean_free_range = *r;
    if (!fields[3].empty()) {
      const auto label = parse_limb_class(fields[3]);
      if (!label) csv_error(path, line_no, "unknown label '" + std::string(fields[3]) + "'");
      s.label = label;
    }
    out.push_back(s);
  }
  if (!header) throw DataError(path.string() + ": empty feature file");
  return out;
}

void write_envelopes_csv(const fs::path &path, std::span<const EnvelopeEmission> emissions) {
  std::string text = "frame,time_s,class,env_max_mps,env_min_mps,filtered\n";
  for (const auto &e : emissions) {
    for (auto c : kAllLimbClasses) {
      const auto &env = e.envelopes[static_cast<std::size_t>(c)];
      if (!env) continue;
      text += std::to_string(e.frame_index) + ',' + format_double(e.time) + ',' +
              std::string(limb_class_name(c)) + ',' + format_double(env->max) + ',' +
              format_double(env->min) + ',' + (e.filtered ? "1" : "0") + '\n';
    }
  }
  write_text(path, text);
}

void write_trajectory_csv(const fs::path &path, const Trajectory &traj) {
  std::string text = "time";
  for (auto s : kAllSegments) {
    const std::string name(segment_name(s));
    text += ',' + name + "_x," + name + "_y," + name + "_z";
  }
  text += '\n';
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    text += format_double(traj.time_at(i));
    for (auto s : kAllSegments) {
      const auto &p = traj.positions(s);
      for (int a = 0; a < 3; ++a) {
        text += ',';
        text += format_double(p(a, i));
      }
    }
    text += '\n';
  }
  write_text(path, text);
}

Trajectory read_trajectory_csv(const fs::path &path) {
  const auto text = read_text(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, int>> columns;  // (segment, axis)
  std::vector<double> times;
  std::vector<std::array<double, 3 * kSegmentCount>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = csv_fields(t);
    if (columns.empty()) {
      if (fields.empty() || fields[0] != "time") csv_error(path, line_no, "first column must be time");
      std::array<int, 3 * kSegmentCount> seen{};
      for (std::size_t c = 1; c < fields.size(); ++c) {
        const auto f = fields[c];
        if (f.size() < 3 || f[f.size() - 2] != '_') csv_error(path, line_no, "bad column " + std::string(f));
        const char axis_char = f.back();
        const int axis = axis_char == 'x' ? 0 : axis_char == 'y' ? 1 : axis_char == 'z' ? 2 : -1;
        const auto seg = parse_segment(f.substr(0, f.size() - 2));
        if (axis < 0 || !seg) csv_error(path, line_no, "unknown column " + std::string(f));
        const auto k = index_of(*seg);
        if (seen[3 * k + static_cast<std::size_t>(axis)]++)
          csv_error(path, line_no, "duplicate column " + std::string(f));
        columns.emplace_back(k, axis);
      }
      if (columns.size() != 3 * kSegmentCount)
        csv_error(path, line_no, "expected 48 segment columns");
      continue;
    }
    if (fields.size() != columns.size() + 1) csv_error(path, line_no, "wrong field count");
    const auto time = parse_double(fields[0]);
    if (!time) csv_error(path, line_no, "cannot parse time");
    std::array<double, 3 * kSegmentCount> row{};
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto v = parse_double(fields[c]);
      if (!v) csv_error(path, line_no, "cannot parse number");
      row[3 * columns[c - 1].first + static_cast<std::size_t>(columns[c - 1].second)] = *v;
    }
    times.push_back(*time);
    rows.push_back(row);
  }
  if (times.size() < 2) throw DataError(path.string() + ": trajectory needs at least 2 samples");
  double rate = static_cast<double>(times.size() - 1) / (times.back() - times.front());
  if (std::abs(rate - std::round(rate)) < 1e-9 * rate) rate = std::round(rate);
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DataError(path.string() + ": bad time axis");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = times.front() + static_cast<double>(i) / rate;
    if (std::abs(times[i] - expected) > 1e-6 / rate)
      throw DataError(path.string() + ": time axis is not uniform");
  }
  Trajectory::Positions pos;
  for (std::size_t s = 0; s < kSegmentCount; ++s) {
    pos[s].resize(3, static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i)
      for (std::size_t a = 0; a < 3; ++a) pos[s](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = rows[i][3 * s + a];
  }
  return Trajectory(times.front(), rate, std::move(pos));
}

void write_spectrogram_csv(const fs::path &path, const Spectrogram &s) {
  std::string text = "t,f,value\n";
  for (Eigen::Index c = 0; c < s.db.cols(); ++c)
    for (Eigen::Index r = 0; r < s.db.rows(); ++r)
      text += format_double(s.time_axis(c)) + ',' + format_double(s.doppler_axis(r)) + ',' +
              format_double(s.db(r, c)) + '\n';
  write_text(path, text);
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path &path) { return read_bytes(path); }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mdl

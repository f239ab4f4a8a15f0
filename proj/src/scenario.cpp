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

#include "mdl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "mdl/error.hpp"
#include "mdl/io.hpp"
#include "mdl/mocap.hpp"
#include "mdl/strings.hpp"

namespace mdl {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

class Reader {
 public:
  Reader(std::string_view source, const Entry &e) : source_(source), e_(e) {}

  [[noreturn]] void fail(const std::string &what) const {
    throw ConfigError(std::string(source_) + ":" + std::to_string(e_.line) + ": " + e_.key + ": " +
                      what);
  }

  double number() const {
    const auto v = parse_double(e_.value);
    if (!v) fail("expected a number, got '" + e_.value + "'");
    return *v;
  }
  std::uint64_t uint() const {
    const auto v = parse_uint(e_.value);
    if (!v) fail("expected a non-negative integer, got '" + e_.value + "'");
    return *v;
  }
  int integer() const {
    const auto v = uint();
    if (v > 1'000'000'000ULL) fail("value too large");
    return static_cast<int>(v);
  }
  bool boolean() const {
    const auto &v = e_.value;
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail("expected true/false, got '" + v + "'");
  }
  Vec3 vec3() const {
    const auto parts = split(e_.value, ',');
    if (parts.size() != 3) fail("expected x,y,z");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      const auto v = parse_double(parts[static_cast<std::size_t>(i)]);
      if (!v) fail("expected x,y,z numbers");
      out(i) = *v;
    }
    return out;
  }
  bool is_none() const { return e_.value == "none"; }
  const std::string &text() const { return e_.value; }

 private:
  std::string_view source_;
  const Entry &e_;
};

using Handler = std::function<void(Scenario &, const Reader &)>;

const std::map<std::string, std::map<std::string, Handler>> &handlers() {
  static const std::map<std::string, std::map<std::string, Handler>> table = {
      {"gait",
       {
           {"mocap_path", [](Scenario &s, const Reader &r) { s.mocap_path = r.text(); }},
           {"height", [](Scenario &s, const Reader &r) { s.gait.subject_height = r.number(); }},
           {"velocity", [](Scenario &s, const Reader &r) { s.gait.relative_velocity = r.number(); }},
           {"cycle_duration",
            [](Scenario &s, const Reader &r) {
              if (r.is_none())
                s.gait.gait_cycle_duration.reset();
              else
                s.gait.gait_cycle_duration = r.number();
            }},
           {"sample_rate", [](Scenario &s, const Reader &r) { s.gait.sample_rate = r.number(); }},
           {"start_position", [](Scenario &s, const Reader &r) { s.gait.start_position = r.vec3(); }},
           {"heading", [](Scenario &s, const Reader &r) { s.gait.heading = r.vec3(); }},
           {"seed", [](Scenario &s, const Reader &r) { s.gait.random_seed = r.uint(); }},
           {"duration",
            [](Scenario &s, const Reader &r) {
              s.duration = r.number();
              s.duration_set = true;
            }},
       }},
      {"radar",
       {
           {"preset", [](Scenario &, const Reader &) {}},  // consumed before the other keys
           {"carrier_frequency",
            [](Scenario &s, const Reader &r) { s.radar.carrier_frequency = r.number(); }},
           {"bandwidth", [](Scenario &s, const Reader &r) { s.radar.bandwidth = r.number(); }},
           {"chirp_duration", [](Scenario &s, const Reader &r) { s.radar.chirp_duration = r.number(); }},
           {"samples_per_chirp",
            [](Scenario &s, const Reader &r) { s.radar.samples_per_chirp = r.integer(); }},
           {"chirps_per_frame",
            [](Scenario &s, const Reader &r) { s.radar.chirps_per_frame = r.integer(); }},
           {"position", [](Scenario &s, const Reader &r) { s.radar.radar_position = r.vec3(); }},
           {"max_range", [](Scenario &s, const Reader &r) { s.radar.max_range = r.number(); }},
           {"snr_db",
            [](Scenario &s, const Reader &r) {
              if (r.is_none())
                s.radar.snr_db.reset();
              else
                s.radar.snr_db = r.number();
            }},
           {"noise_seed", [](Scenario &s, const Reader &r) { s.radar.noise_seed = r.uint(); }},
       }},
      {"processing",
       {
           {"gamma", [](Scenario &s, const Reader &r) { s.processing.gamma = r.number(); }},
           {"histogram_bins",
            [](Scenario &s, const Reader &r) { s.processing.histogram_bins = r.integer(); }},
           {"dynamic_range_db",
            [](Scenario &s, const Reader &r) { s.processing.dynamic_range_db = r.number(); }},
           {"threshold", [](Scenario &s, const Reader &r) { s.processing.threshold = r.boolean(); }},
           {"stft_window", [](Scenario &s, const Reader &r) { s.processing.stft.window_len = r.integer(); }},
           {"stft_hop", [](Scenario &s, const Reader &r) { s.processing.stft.hop = r.integer(); }},
           {"stft_sigma", [](Scenario &s, const Reader &r) { s.processing.stft.sigma = r.number(); }},
       }},
      {"classifier",
       {
           {"max_depth",
            [](Scenario &s, const Reader &r) {
              s.tree.max_depth = r.is_none() ? kUnlimitedDepth : r.integer();
            }},
           {"min_samples_leaf",
            [](Scenario &s, const Reader &r) { s.tree.min_samples_leaf = r.uint(); }},
           {"seed", [](Scenario &s, const Reader &r) { s.tree.seed = r.uint(); }},
           {"train_fraction", [](Scenario &s, const Reader &r) { s.train_fraction = r.number(); }},
           {"median_order", [](Scenario &s, const Reader &r) { s.median_order = r.integer(); }},
           {"half_cycle",
            [](Scenario &s, const Reader &r) {
              if (r.is_none())
                s.half_cycle.reset();
              else
                s.half_cycle = r.number();
            }},
       }},
      {"output",
       {
           {"dir", [](Scenario &s, const Reader &r) { s.output_dir = r.text(); }},
           {"plot", [](Scenario &s, const Reader &r) { s.plot = r.boolean(); }},
           {"parallel", [](Scenario &s, const Reader &r) { s.parallel = r.integer(); }},
       }},
  };
  return table;
}

// Keys that describe the analytic walker and therefore conflict with mocap.
const std::set<std::string> kAnalyticGaitKeys = {"height",         "velocity", "cycle_duration",
                                                 "start_position", "heading",  "seed"};

std::string vec_text(const Vec3 &v) {
  return format_double(v.x()) + "," + format_double(v.y()) + "," + format_double(v.z());
}

}  // namespace

GaitConfig preset_gait(Preset p) {
  GaitConfig g;
  if (p == Preset::kModelA) {
    g.start_position = Vec3(10.0, 0.0, 0.0);
    g.relative_velocity = 1.0;
    g.subject_height = 1.75;
  } else {
    g.start_position = Vec3(5.0, 0.0, 0.0);
    g.relative_velocity = 1.4;
    g.subject_height = 1.7;
  }
  return g;
}

void Scenario::validate() const {
  if (!mocap_path) gait.validate();
  radar.validate();
  processing.validate();
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0, 1)");
  if (median_order < 1 || median_order % 2 == 0) throw ConfigError("median_order must be odd and >= 1");
  if (tree.max_depth < 0) throw ConfigError("max_depth must be non-negative");
  if (half_cycle && !(*half_cycle > 0.0)) throw ConfigError("half_cycle must be positive");
  if (parallel < 1) throw ConfigError("parallel must be >= 1");
}

std::string Scenario::canonical_text() const {
  std::ostringstream out;
  out << "preset=" << (preset ? preset_name(*preset) : "none") << '\n';
  if (mocap_path) {
    out << "gait.mocap_path=" << mocap_path->generic_string() << '\n';
  } else {
    out << "gait.height=" << format_double(gait.subject_height) << '\n'
        << "gait.velocity=" << format_double(gait.relative_velocity) << '\n'
        << "gait.cycle_duration=" << format_double(gait.cycle_duration()) << '\n'
        << "gait.start_position=" << vec_text(gait.start_position) << '\n'
        << "gait.heading=" << vec_text(gait.heading) << '\n'
        << "gait.seed=" << gait.random_seed << '\n';
  }
  out << "gait.sample_rate=" << format_double(gait.sample_rate) << '\n'
      << "gait.duration=" << (duration_set || !mocap_path ? format_double(duration) : "recording")
      << '\n'
      << "radar.carrier_frequency=" << format_double(radar.carrier_frequency) << '\n'
      << "radar.bandwidth=" << format_double(radar.bandwidth) << '\n'
      << "radar.chirp_duration=" << format_double(radar.chirp_duration) << '\n'
      << "radar.samples_per_chirp=" << radar.samples_per_chirp << '\n'
      << "radar.chirps_per_frame=" << radar.chirps_per_frame << '\n'
      << "radar.position=" << vec_text(radar.radar_position) << '\n'
      << "radar.max_range=" << format_double(radar.max_range) << '\n'
      << "radar.snr_db=" << (radar.snr_db ? format_double(*radar.snr_db) : "none") << '\n'
      << "radar.noise_seed=" << radar.noise_seed << '\n'
      << "processing.gamma=" << format_double(processing.gamma) << '\n'
      << "processing.histogram_bins=" << processing.histogram_bins << '\n'
      << "processing.dynamic_range_db=" << format_double(processing.dynamic_range_db) << '\n'
      << "processing.threshold=" << (processing.threshold ? "true" : "false") << '\n'
      << "processing.stft_window=" << processing.stft.window_len << '\n'
      << "processing.stft_hop=" << processing.stft.hop << '\n'
      << "processing.stft_sigma=" << format_double(processing.stft.sigma) << '\n'
      << "classifier.max_depth="
      << (tree.max_depth == kUnlimitedDepth ? std::string("none") : std::to_string(tree.max_depth))
      << '\n'
      << "classifier.min_samples_leaf=" << tree.min_samples_leaf << '\n'
      << "classifier.seed=" << tree.seed << '\n'
      << "classifier.train_fraction=" << format_double(train_fraction) << '\n'
      << "classifier.median_order=" << median_order << '\n'
      << "classifier.half_cycle=" << (half_cycle ? format_double(*half_cycle) : "none") << '\n';
  return out.str();
}

std::uint64_t Scenario::hash() const { return fnv1a(canonical_text()); }

Scenario parse_scenario(std::string_view text, std::string_view source,
                        const ScenarioOverrides &overrides, const std::filesystem::path &base_dir) {
  const auto &table = handlers();
  std::vector<std::pair<std::string, Entry>> entries;
  std::set<std::string> seen;
  std::string section;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    const auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!table.contains(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of a section");
    Entry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    if (e.key.empty()) throw ConfigError(where + "empty key");
    if (!table.at(section).contains(e.key))
      throw ConfigError(where + "unknown key '" + e.key + "' in [" + section + "]");
    if (!seen.insert(section + "." + e.key).second)
      throw ConfigError(where + "duplicate key '" + e.key + "' in [" + section + "]");
    entries.emplace_back(section, std::move(e));
  }

  Scenario s;
  std::optional<Preset> preset = overrides.preset;
  if (!preset) {
    for (const auto &[sec, e] : entries) {
      if (sec != "radar" || e.key != "preset") continue;
      preset = parse_preset(e.value);
      if (!preset)
        throw ConfigError(std::string(source) + ":" + std::to_string(e.line) +
                          ": preset must be model-a or model-b");
    }
  }
  if (preset) {
    s.preset = preset;
    s.radar = preset_radar(*preset);
    s.gait = preset_gait(*preset);
  }
  for (const auto &[sec, e] : entries) table.at(sec).at(e.key)(s, Reader(source, e));

  if (s.mocap_path) {
    for (const auto &[sec, e] : entries)
      if (sec == "gait" && kAnalyticGaitKeys.contains(e.key))
        throw ConfigError(std::string(source) + ":" + std::to_string(e.line) +
                          ": gait key '" + e.key + "' conflicts with mocap_path");
    if (s.mocap_path->is_relative()) s.mocap_path = base_dir / *s.mocap_path;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(*s.mocap_path, ec))
      throw ConfigError(std::string(source) + ": mocap file not found: " + s.mocap_path->string());
  }

  if (overrides.output_dir) s.output_dir = *overrides.output_dir;
  if (overrides.seed) {
    s.gait.random_seed = *overrides.seed;
    s.radar.noise_seed = *overrides.seed;
    s.tree.seed = *overrides.seed;
  }
  if (overrides.gamma) s.processing.gamma = *overrides.gamma;
  if (overrides.parallel) s.parallel = *overrides.parallel;
  if (overrides.plot) s.plot = true;
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path &path, const ScenarioOverrides &overrides) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw IoError("config file not found: " + path.string());
  const auto text = read_text(path);
  return parse_scenario(text, path.string(), overrides, path.parent_path());
}

Trajectory scenario_trajectory(const Scenario &s) {
  if (!s.mocap_path) return generate_gait(s.gait, s.duration);
  const auto rec = load_mocap(*s.mocap_path);
  auto traj = mocap_to_trajectory(rec, s.gait.sample_rate);
  if (!s.duration_set) return traj;
  if (s.duration > traj.end_time() - traj.start_time() + 1e-9)
    throw ConfigError("duration exceeds the mocap recording span");
  const auto n = static_cast<Eigen::Index>(std::floor(s.duration * traj.sample_rate() + 1e-9)) + 1;
  Trajectory::Positions pos;
  for (std::size_t k = 0; k < kSegmentCount; ++k) pos[k] = traj.all_positions()[k].leftCols(n);
  return Trajectory(traj.start_time(), traj.sample_rate(), std::move(pos));
}

ShapeTable scenario_shapes(const Scenario &s, const Trajectory &traj) {
  if (!s.mocap_path) return default_shapes(s.gait.subject_height);
  // The head centre sits at 0.93 of body height in the default layout.
  const double head_z = traj.positions(SegmentId::kHead).row(2).mean();
  const double height = std::clamp(head_z / 0.93, 1.0, 2.2);
  return default_shapes(height);
}

void RunManifest::write(const std::filesystem::path &output_dir) const {
  nlohmann::json j;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  j["config_hash"] = std::string("fnv1a64:") + hash;
  j["version"] = version;
  nlohmann::json stages = nlohmann::json::array();
  for (const auto &st : this->stages) {
    for (const auto &f : st.files) {
      std::error_code ec;
      if (!std::filesystem::exists(output_dir / f, ec))
        throw IoError("manifest lists missing file " + (output_dir / f).string());
    }
    stages.push_back({{"name", st.name}, {"files", st.files}, {"seconds", st.seconds}});
  }
  j["stages"] = stages;
  write_text(output_dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace mdl

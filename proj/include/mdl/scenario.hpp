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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdl/body.hpp"
#include "mdl/gait.hpp"
#include "mdl/pipeline.hpp"
#include "mdl/radar.hpp"
#include "mdl/tree.hpp"

namespace mdl {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Gait side of a preset.
GaitConfig preset_gait(Preset p);

/// Everything a run needs, after preset, file and flag precedence.
struct Scenario {
  std::optional<Preset> preset;
  GaitConfig gait;
  std::optional<std::filesystem::path> mocap_path;
  double duration = 3.0;  // s; for mocap input, defaults to the recording span
  bool duration_set = false;
  RadarConfig radar;
  ProcessingConfig processing;
  TreeParams tree;
  double train_fraction = 0.75;
  int median_order = kDefaultMedianOrder;
  std::optional<double> half_cycle;  // s; enables side disambiguation
  std::filesystem::path output_dir = "out";
  bool plot = false;
  int parallel = 1;

  void validate() const;

  /// Deterministic `key = value` dump of every effective setting.
  std::string canonical_text() const;
  std::uint64_t hash() const;
};

/// Command-line values that override the file.
struct ScenarioOverrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;  // gait phase, noise and split/tree seeds
  std::optional<double> gamma;
  std::optional<Preset> preset;
  std::optional<int> parallel;
  bool plot = false;
};

/// INI-style text: `[section]` headers, `key = value` lines, `#`/`;`
/// comments. Sections: gait, radar, processing, classifier, output. Unknown
/// sections or keys, duplicates and malformed values are ConfigErrors
/// carrying `source:line`. Relative paths resolve against `base_dir`.
Scenario parse_scenario(std::string_view text, std::string_view source,
                        const ScenarioOverrides &overrides = {},
                        const std::filesystem::path &base_dir = ".");

Scenario load_scenario(const std::filesystem::path &path, const ScenarioOverrides &overrides = {});

/// Trajectory of the scenario's subject (analytic or mocap).
Trajectory scenario_trajectory(const Scenario &s);

/// Body shapes for the scenario; for mocap input the height is estimated
/// from the head marker.
ShapeTable scenario_shapes(const Scenario &s, const Trajectory &traj);

/// Per-stage record written to manifest.json.
struct StageRecord {
  std::string name;
  std::vector<std::string> files;  // relative to the output directory
  double seconds = 0.0;
};

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string version{kToolVersion};
  std::vector<StageRecord> stages;

  /// Fails with IoError if a listed file does not exist.
  void write(const std::filesystem::path &output_dir) const;
};

}  // namespace mdl

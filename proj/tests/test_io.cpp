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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <bit>
#include <fstream>
#include <random>

#include "json.hpp"
#include "mdl/io.hpp"
#include "mdl/mocap.hpp"
#include "mdl/scenario.hpp"

using namespace mdl;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("mdl_test_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool has(const std::string &text, const std::string &needle) {
  return text.find(needle) != std::string::npos;
}

std::string config_error(std::string_view text) {
  try {
    parse_scenario(text, "test.ini");
  } catch (const ConfigError &e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("frame files") {
  TempDir tmp;
  CHECK(frame_file_name(7) == "frame_000007.bin");
  CHECK(meta_path("a/frame_000007.bin") == fs::path("a/frame_000007.meta"));

  const auto gait = preset_gait(Preset::kModelB);
  const auto traj = generate_gait(gait, 1.5);
  const auto frame = synth_frame(traj, default_shapes(gait.subject_height), RadarConfig{}, 0.256);
  const auto path = tmp.path / frame_file_name(8);
  write_frame(path, frame);
  CHECK(fs::file_size(path) == 256u * 64u * 8u);
  const auto meta = nlohmann::json::parse(read_text(meta_path(path)));
  CHECK(meta["N_s"] == 256);
  CHECK(meta["N_p"] == 64);
  CHECK(meta["T_p"] == 0.5e-3);
  CHECK(meta["f_c"] == 25e9);
  CHECK(meta["B"] == 2e9);
  CHECK(meta["frame_start"] == 0.256);

  const auto back = read_frame(path);
  CHECK(back.start_time == 0.256);
  CHECK(back.config.chirps_per_frame == 64);
  const Eigen::MatrixXcd as_float = frame.data.cast<std::complex<float>>().cast<std::complex<double>>();
  CHECK(back.data == as_float);

  // Little-endian float32 (re, im), range-major.
  std::ifstream raw(path, std::ios::binary);
  unsigned char b[16];
  raw.read(reinterpret_cast<char *>(b), 16);
  auto f32 = [&](int o) {
    const std::uint32_t u = b[o] | (b[o + 1] << 8) | (b[o + 2] << 16) | (static_cast<std::uint32_t>(b[o + 3]) << 24);
    return std::bit_cast<float>(u);
  };
  CHECK(f32(0) == static_cast<float>(frame.data(0, 0).real()));
  CHECK(f32(4) == static_cast<float>(frame.data(0, 0).imag()));
  CHECK(f32(8) == static_cast<float>(frame.data(0, 1).real()));

  write_frame(tmp.path / frame_file_name(2), frame);
  write_frame(tmp.path / frame_file_name(10), frame);
  write_text(tmp.path / "notes.txt", "x");
  const auto list = list_frames(tmp.path);
  REQUIRE(list.size() == 3);
  CHECK(list[0].filename() == "frame_000002.bin");
  CHECK(list[2].filename() == "frame_000010.bin");
  CHECK_THROWS_AS(list_frames(tmp.path / "nope"), IoError);

  // Truncated data, broken sidecar, missing file.
  fs::resize_file(tmp.path / frame_file_name(2), 100);
  CHECK_THROWS_AS(read_frame(tmp.path / frame_file_name(2)), DataError);
  write_text(meta_path(tmp.path / frame_file_name(10)), "{\"N_s\": 256}");
  CHECK_THROWS_AS(read_frame(tmp.path / frame_file_name(10)), DataError);
  write_text(meta_path(tmp.path / frame_file_name(10)), "not json");
  CHECK_THROWS_AS(read_frame(tmp.path / frame_file_name(10)), DataError);
  CHECK_THROWS_AS(read_frame(tmp.path / "frame_000099.bin"), IoError);
}

TEST_CASE("matrix and mask files") {
  TempDir tmp;
  Eigen::MatrixXd m(3, 4);
  m << 1, 2, 3, 4, -5, -6.5, 7, 8, 0, 0, 1e-3, -240;
  write_matrix(tmp.path / "m.bin", m);
  CHECK(read_matrix(tmp.path / "m.bin") == m.cast<float>().cast<double>());
  BoolMatrix b = BoolMatrix::Constant(5, 2, false);
  b(1, 1) = b(4, 0) = true;
  write_mask(tmp.path / "k.bin", b);
  CHECK(read_mask(tmp.path / "k.bin") == b);
  CHECK(fs::file_size(tmp.path / "k.bin") == 10u);
  fs::resize_file(tmp.path / "k.bin", 9);
  CHECK_THROWS_AS(read_mask(tmp.path / "k.bin"), DataError);

  RangeDopplerMap map;
  map.db = m;
  map.range_axis = Eigen::VectorXd::LinSpaced(3, 0.0, 0.15);
  map.velocity_axis = Eigen::VectorXd::LinSpaced(4, -0.375, 0.1875);
  map.frame_time = 0.064;
  write_map(tmp.path / "map.bin", map);
  const auto meta = nlohmann::json::parse(read_text(meta_path(tmp.path / "map.bin")));
  CHECK(meta["rows"] == 3);
  CHECK(meta["frame_time"] == 0.064);
  CHECK(meta["velocity_min_mps"] == -0.375);
}

TEST_CASE("feature CSV round trip") {
  TempDir tmp;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::vector<FeatureSample> s(50);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i].frame_index = i / 7;
    s[i].velocity = u(rng);
    s[i].mean_free_range = u(rng) / 10.0;
    if (i % 5 != 0) s[i].label = limb_class_at(i % 4);
  }
  const auto path = tmp.path / "features.csv";
  write_features_csv(path, s);
  const auto text = read_text(path);
  CHECK(text.rfind("frame,velocity_mps,meanfree_range_m,label\n", 0) == 0);
  const auto back = read_features_csv(path);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back[i].frame_index == s[i].frame_index);
    CHECK(back[i].velocity == s[i].velocity);  // shortest round-trip formatting
    CHECK(back[i].mean_free_range == s[i].mean_free_range);
    CHECK(back[i].label == s[i].label);
  }
  write_text(path, "frame,velocity_mps,meanfree_range_m,label\n0,1.0,0.1,torso\n");
  CHECK_THROWS_AS(read_features_csv(path), DataError);
  write_text(path, "frame,velocity,range\n");
  CHECK_THROWS_AS(read_features_csv(path), DataError);
  write_text(path, "frame,velocity_mps,meanfree_range_m,label\n0,abc,0.1,feet\n");
  try {
    read_features_csv(path);
    FAIL("expected an error");
  } catch (const DataError &e) {
    CHECK(has(e.what(), ":2:"));
  }
}

TEST_CASE("envelope CSV") {
  TempDir tmp;
  EnvelopeEmission a{3, 0.096, {}, false};
  a.envelopes[index_of(LimbClass::kFeet)] = Envelope{4.5, -0.5};
  a.envelopes[index_of(LimbClass::kBase)] = Envelope{1.5, 1.0};
  EnvelopeEmission b = a;
  b.filtered = true;
  const std::vector<EnvelopeEmission> e{a, b};
  write_envelopes_csv(tmp.path / "e.csv", e);
  CHECK(read_text(tmp.path / "e.csv") ==
        "frame,time_s,class,env_max_mps,env_min_mps,filtered\n"
        "3,0.096,base,1.5,1,0\n"
        "3,0.096,feet,4.5,-0.5,0\n"
        "3,0.096,base,1.5,1,1\n"
        "3,0.096,feet,4.5,-0.5,1\n");
}

TEST_CASE("trajectory CSV round trip") {
  TempDir tmp;
  const auto traj = generate_gait(preset_gait(Preset::kModelA), 1.8);
  write_trajectory_csv(tmp.path / "t.csv", traj);
  const auto back = read_trajectory_csv(tmp.path / "t.csv");
  CHECK(back.sample_rate() == traj.sample_rate());
  CHECK(back.size() == traj.size());
  for (auto s : kAllSegments) CHECK(back.positions(s) == traj.positions(s));
  write_text(tmp.path / "bad.csv", "time,head_x\n0,1\n");
  CHECK_THROWS_AS(read_trajectory_csv(tmp.path / "bad.csv"), DataError);
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("scenario defaults and presets") {
  const auto s = parse_scenario("", "empty.ini");
  CHECK_FALSE(s.preset.has_value());
  CHECK(s.duration == 3.0);
  CHECK(s.processing.gamma == 0.65);
  CHECK(s.median_order == 9);
  CHECK(s.train_fraction == 0.75);

  const auto b = parse_scenario("[radar]\npreset = model-b\n", "b.ini");
  CHECK(b.preset == Preset::kModelB);
  CHECK(b.gait.relative_velocity == 1.4);
  CHECK(b.gait.subject_height == 1.7);
  CHECK(b.gait.start_position.x() == 5.0);
  const auto a = parse_scenario("[radar]\npreset = model-a\n", "a.ini");
  CHECK(a.gait.relative_velocity == 1.0);
  CHECK(a.gait.start_position.x() == 10.0);
  CHECK(a.radar.carrier_frequency == 25e9);
  CHECK(a.radar.bandwidth == 2e9);
  CHECK(a.hash() != b.hash());
  CHECK(parse_scenario("[radar]\npreset = model-b\n", "other.ini").hash() == b.hash());
}

TEST_CASE("scenario precedence: preset, then file, then command line") {
  const std::string text =
      "# comment\n[radar]\npreset = model-b\n[gait]\nvelocity = 1.2\nseed = 4\n"
      "[processing]\ngamma = 0.5\n[classifier]\nmax_depth = none\nseed = 9\n";
  const auto s = parse_scenario(text, "p.ini");
  CHECK(s.gait.relative_velocity == 1.2);
  CHECK(s.gait.subject_height == 1.7);
  CHECK(s.processing.gamma == 0.5);
  CHECK(s.tree.max_depth == kUnlimitedDepth);
  CHECK(s.tree.seed == 9);
  CHECK(s.gait.random_seed == 4);

  ScenarioOverrides o;
  o.gamma = 0.8;
  o.seed = 77;
  o.preset = Preset::kModelA;
  o.output_dir = "elsewhere";
  o.parallel = 3;
  o.plot = true;
  const auto t = parse_scenario(text, "p.ini", o);
  CHECK(t.processing.gamma == 0.8);
  CHECK(t.gait.random_seed == 77);
  CHECK(t.radar.noise_seed == 77);
  CHECK(t.tree.seed == 77);
  CHECK(t.preset == Preset::kModelA);
  CHECK(t.gait.subject_height == 1.75);   // model-a subject ...
  CHECK(t.gait.relative_velocity == 1.2);  // ... with the file's explicit velocity
  CHECK(t.output_dir == fs::path("elsewhere"));
  CHECK(t.parallel == 3);
  CHECK(t.plot);

  // Output-only options leave the configuration hash alone.
  ScenarioOverrides out_only;
  out_only.output_dir = "elsewhere";
  out_only.parallel = 3;
  out_only.plot = true;
  CHECK(parse_scenario(text, "p.ini", out_only).hash() == parse_scenario(text, "p.ini", {}).hash());
  CHECK(t.hash() != parse_scenario(text, "p.ini", {}).hash());
}

TEST_CASE("scenario errors name the file and line") {
  CHECK(has(config_error("[gait]\nheight = 1.7\nspeed = 2\n"), "test.ini:3:"));
  CHECK(has(config_error("[gait]\nheight = 1.7\nspeed = 2\n"), "speed"));
  CHECK(has(config_error("[gait]\nheight = 1.7\nheight = 1.8\n"), "duplicate"));
  CHECK(has(config_error("[gait]\nheight = tall\n"), "test.ini:2:"));
  CHECK(has(config_error("[nonsense]\n"), "test.ini:1:"));
  CHECK(has(config_error("[gait\n"), "malformed"));
  CHECK(has(config_error("height = 1.7\n"), "outside"));
  CHECK(has(config_error("[radar]\npreset = model-z\n"), "test.ini:2:"));
  CHECK(has(config_error("[radar]\nchirps_per_frame = 48\n"), "power of two"));
  CHECK(has(config_error("[classifier]\nmedian_order = 8\n"), "median_order"));
  CHECK(has(config_error("[gait]\nheight = 3.0\n"), "height"));
  CHECK(has(config_error("[gait]\nmocap_path = x.csv\nvelocity = 1.0\n"), "mocap"));
  CHECK(has(config_error("[gait]\nmocap_path = /does/not/exist.csv\n"), "not found"));
  CHECK_THROWS_AS(load_scenario("/does/not/exist.ini"), IoError);
}

TEST_CASE("mocap scenarios") {
  TempDir tmp;
  const auto gait = generate_gait(preset_gait(Preset::kModelB), 2.0);
  {
    std::ofstream out(tmp.path / "walk.csv");
    write_mocap(out, trajectory_to_mocap(gait));
  }
  write_text(tmp.path / "run.ini", "[gait]\nmocap_path = walk.csv\n");
  const auto s = load_scenario(tmp.path / "run.ini");
  REQUIRE(s.mocap_path.has_value());
  const auto traj = scenario_trajectory(s);
  CHECK(traj.size() == gait.size());
  const auto shapes = scenario_shapes(s, traj);
  CHECK(shapes[index_of(SegmentId::kTorso)].c == doctest::Approx(default_shapes(1.7)[index_of(SegmentId::kTorso)].c).epsilon(0.03));

  write_text(tmp.path / "short.ini", "[gait]\nmocap_path = walk.csv\nduration = 1.0\n");
  CHECK(scenario_trajectory(load_scenario(tmp.path / "short.ini")).end_time() == doctest::Approx(1.0));
  write_text(tmp.path / "long.ini", "[gait]\nmocap_path = walk.csv\nduration = 5.0\n");
  CHECK_THROWS_AS(scenario_trajectory(load_scenario(tmp.path / "long.ini")), ConfigError);
}

TEST_CASE("run manifest") {
  TempDir tmp;
  write_text(tmp.path / "features.csv", "x");
  RunManifest m;
  m.config_hash = 0x1234;
  m.stages.push_back({"process", {"features.csv"}, 0.5});
  m.write(tmp.path);
  const auto j = nlohmann::json::parse(read_text(tmp.path / "manifest.json"));
  CHECK(j["config_hash"] == "fnv1a64:0000000000001234");
  CHECK(j["version"] == std::string(kToolVersion));
  CHECK(j["stages"][0]["name"] == "process");
  CHECK(j["stages"][0]["files"][0] == "features.csv");
  m.stages.push_back({"train-eval", {"tree.json"}, 0.1});
  CHECK_THROWS_AS(m.write(tmp.path), IoError);
}

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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "mdl/confusion.hpp"
#include "mdl/envelope.hpp"
#include "mdl/io.hpp"
#include "mdl/pipeline.hpp"
#include "mdl/rcs.hpp"
#include "mdl/scenario.hpp"
#include "support.hpp"

using namespace mdl;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome rcs_identities() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> radius(0.001, 2.0), angle(0.0, 2.0 * std::numbers::pi);
  double worst_sphere = 0.0, worst_sym = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = radius(rng);
    const double s = rcs_ellipsoid(Ellipsoid{r, r, r}, 0.5 * angle(rng), angle(rng));
    worst_sphere = std::max(worst_sphere, std::abs(s - std::numbers::pi * r * r) / (std::numbers::pi * r * r));
  }
  for (int i = 0; i < 1000; ++i) {
    const Ellipsoid e{radius(rng), radius(rng), radius(rng)};
    const double th = 0.5 * angle(rng), ph = angle(rng);
    const double a = rcs_ellipsoid(e, th, ph);
    const double b = rcs_ellipsoid(e, std::numbers::pi - th, ph + std::numbers::pi);
    worst_sym = std::max(worst_sym, std::abs(a - b) / a);
  }
  const double dt = seconds_since(t0);
  return {worst_sphere <= 1e-9 && worst_sym <= 1e-12 && dt < 1.0,
          fmt("sphere rel err %.2e, symmetry rel err %.2e, %.3f s", worst_sphere, worst_sym, dt)};
}

Outcome radar_arithmetic() {
  const RadarConfig cfg;
  const double rres = cfg.range_resolution();
  const double tp = chirp_duration(25e9, 6.0);
  const auto np = chirps_per_frame(25e9, 0.5e-3, 0.1);
  const bool ok = rres == 0.075 && tp == 0.5e-3 && std::abs(np.raw - 120.0) < 1e-9 && np.count == 128;
  return {ok, fmt("range res %.17g m, T_p %.17g s, raw chirps %.12g (next power of two %lld)", rres, tp,
                  np.raw, static_cast<long long>(np.count))};
}

Outcome point_target() {
  const auto t0 = Clock::now();
  const RadarConfig cfg;
  const double v = 1.4, d = 5.0;
  // Centre the frame on 5.0 m while approaching at 1.4 m/s.
  const double start = d + v * cfg.frame_duration() / 2.0;
  const auto traj =
      oracle::point_scatterer(SegmentId::kTorso, Vec3(start, 0, 1), Vec3(-v, 0, 0), 0.04);
  const auto map = range_doppler_map(synth_frame(traj, default_shapes(1.75), cfg, 0.0));
  Eigen::Index r = 0, c = 0;
  map.db.maxCoeff(&r, &c);
  const double want_r = d / cfg.range_resolution();
  const double want_c = static_cast<double>(cfg.chirps_per_frame / 2) + v / cfg.velocity_resolution();
  const double v_hat = map.velocity_axis(c);
  const double dt = seconds_since(t0);
  const bool ok = std::abs(static_cast<double>(r) - want_r) <= 1.0 &&
                  std::abs(static_cast<double>(c) - want_c) <= 1.0 &&
                  std::abs(v_hat - v) <= cfg.velocity_resolution() && dt < 5.0;
  return {ok, fmt("peak (range bin %lld, doppler bin %lld) vs (%.2f, %.2f); v = %.4f m/s; %.3f s",
                  static_cast<long long>(r), static_cast<long long>(c), want_r, want_c, v_hat, dt)};
}

Outcome otsu_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int matches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd grid(64, 64);
    const double m1 = 0.1 + 0.3 * u(rng), m2 = 0.5 + 0.4 * u(rng), mix = u(rng);
    std::normal_distribution<double> a(m1, 0.05 + 0.1 * u(rng)), b(m2, 0.05 + 0.1 * u(rng));
    for (auto &x : grid.reshaped())
      x = std::clamp(trial % 2 == 0 ? u(rng) : (u(rng) < mix ? a(rng) : b(rng)), 0.0, 1.0);
    const auto fast = otsu_threshold(grid, 256);
    const auto ref = oracle::brute_otsu(grid, 256);
    if (ref.boundary && fast.threshold == static_cast<double>(*ref.boundary) / 256.0) ++matches;
  }
  const double dt = seconds_since(t0);
  return {matches == 100 && dt < 10.0, fmt("%d/100 grids match the exhaustive minimizer, %.2f s", matches, dt)};
}

Outcome gamma_values() {
  Eigen::MatrixXd m(1, 3);
  m << 0.0, 1.0, 0.25;
  const Eigen::MatrixXd g = gamma_transform(m, 0.65);
  const double ref = std::exp(0.65 * std::log(0.25));
  const bool ok = g(0, 0) == 0.0 && g(0, 1) == 1.0 && std::abs(g(0, 2) - ref) < 1e-6 &&
                  std::abs(g(0, 2) - 0.40613) < 1e-5;
  return {ok, fmt("0 -> %g, 1 -> %g, 0.25 -> %.6f (oracle %.6f)", g(0, 0), g(0, 1), g(0, 2), ref)};
}

Outcome gait_anchors() {
  GaitConfig cfg;
  cfg.relative_velocity = 1.5;
  const double cycle = cfg.cycle_duration();
  const auto traj = generate_gait(cfg, 4.0 * cycle);
  const auto l = segment_speed(traj, SegmentId::kLeftFoot);
  const auto r = segment_speed(traj, SegmentId::kRightFoot);
  const double peak = l.segment(1, l.size() - 2).maxCoeff();
  const auto per_cycle = static_cast<Eigen::Index>(std::llround(cycle * cfg.sample_rate));
  const Eigen::Index span = 2 * per_cycle;
  const Eigen::VectorXd a = l.segment(per_cycle, span).array() - l.mean();
  Eigen::Index best_lag = 0;
  double best = -1e300;
  for (Eigen::Index lag = 0; lag < per_cycle; ++lag) {
    const Eigen::VectorXd b = r.segment(per_cycle + lag, span).array() - r.mean();
    if (a.dot(b) > best) {
      best = a.dot(b);
      best_lag = lag;
    }
  }
  const double half = cycle * cfg.sample_rate / 2.0;
  const bool ok = std::abs(peak - 6.0) <= 1.5 && std::abs(static_cast<double>(best_lag) - half) <= 1.0;
  return {ok, fmt("foot peak %.3f m/s; left/right lag %lld samples vs half cycle %.1f", peak,
                  static_cast<long long>(best_lag), half)};
}

Outcome classifier() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> v(-6.0, 6.0), r(-0.8, 0.8);
  std::uniform_int_distribution<int> c(0, 3);
  auto dataset = [&](std::size_t n) {
    std::vector<FeatureSample> out(n);
    for (auto &s : out) {
      s.velocity = v(rng);
      s.mean_free_range = r(rng);
      s.label = limb_class_at(static_cast<std::size_t>(c(rng)));
      if (c(rng) != 0) s.label = std::abs(s.velocity) > 4.0 ? LimbClass::kFeet : LimbClass::kBase;
    }
    return out;
  };
  const auto big = dataset(2000);
  const auto tree = DecisionTree::train(big, {kUnlimitedDepth, 1, 0});
  std::size_t correct = 0;
  for (const auto &s : big) correct += tree.predict(s) == *s.label;
  int oracle_matches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto small = dataset(200);
    const auto ref = oracle::brute_best_split(small, 1);
    const auto t = DecisionTree::train(small, {kUnlimitedDepth, 1, 0});
    const auto &root = t.nodes()[0];
    if (ref && !root.leaf && root.feature == ref->feature && root.threshold == ref->threshold) ++oracle_matches;
  }
  return {correct == big.size() && oracle_matches == 20,
          fmt("training accuracy %zu/%zu; root split matches oracle on %d/20 sets", correct, big.size(),
              oracle_matches)};
}

Outcome table_reproduction() {
  const auto t0 = Clock::now();
  const RadarConfig radar;
  const ProcessingConfig proc;
  std::vector<FeatureSample> data;
  std::size_t subjects = 0, next_frame = 0;
  const auto pool = training_subjects(40, 2024, radar);
  for (const auto &g : pool) {
    if (data.size() >= 50000) break;
    const auto traj = generate_gait(g, approach_duration(g, radar));
    auto f = labeled_walk_features(traj, default_shapes(g.subject_height), radar, proc, next_frame);
    next_frame += static_cast<std::size_t>(frame_count(traj, radar));
    data.insert(data.end(), f.begin(), f.end());
    ++subjects;
  }
  const auto [train, val] = split_dataset(data, 0.75, 42);
  const auto tree = DecisionTree::train(train, {});
  std::vector<LimbClass> truth;
  for (const auto &s : val) truth.push_back(*s.label);
  const auto cm = confusion_matrix(truth, tree.predict(val));
  const auto p = cm.percentages();
  const auto at = [&](LimbClass a, LimbClass b) { return p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)); };
  bool ok = data.size() >= 50000;
  for (auto row : {LimbClass::kArms, LimbClass::kFeet, LimbClass::kLegs})
    for (auto col : kAllLimbClasses)
      if (col != row && at(row, col) > at(row, row)) ok = false;
  ok = ok && at(LimbClass::kFeet, LimbClass::kBase) <= 2.0 && at(LimbClass::kBase, LimbClass::kFeet) <= 2.0;
  const double dt = seconds_since(t0);
  ok = ok && dt < 300.0;
  std::printf("%s", format_confusion(cm).c_str());
  return {ok, fmt("%zu samples from %zu subjects; diag arms %.1f%% feet %.1f%% legs %.1f%% base %.1f%%; "
                  "feet->base %.2f%%, base->feet %.2f%%; %.1f s",
                  data.size(), subjects, at(LimbClass::kArms, LimbClass::kArms),
                  at(LimbClass::kFeet, LimbClass::kFeet), at(LimbClass::kLegs, LimbClass::kLegs),
                  at(LimbClass::kBase, LimbClass::kBase), at(LimbClass::kFeet, LimbClass::kBase),
                  at(LimbClass::kBase, LimbClass::kFeet), dt)};
}

Outcome streaming_contract() {
  const auto gait = preset_gait(Preset::kModelB);
  const RadarConfig radar;
  const auto shapes = default_shapes(gait.subject_height);
  const auto traj = generate_gait(gait, 100.0 * radar.frame_duration() + 0.01);
  const auto train = labeled_walk_features(traj, shapes, radar, ProcessingConfig{});
  const auto tree = DecisionTree::train(train, {});
  std::vector<ChirpFrame> frames;
  for (int k = 0; k < 100; ++k) frames.push_back(synth_frame(traj, shapes, radar, k * radar.frame_duration()));

  StreamDecomposer dec(tree, ProcessingConfig{});
  bool latency_ok = true;
  std::size_t filtered = 0;
  double total = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto t0 = Clock::now();
    const auto out = dec.push(frames[k]);
    const double dt = seconds_since(t0);
    total += dt;
    worst = std::max(worst, dt);
    for (const auto &e : out) {
      if (!e.filtered) continue;
      ++filtered;
      if (k < 4 || e.frame_index != k - 4) latency_ok = false;
    }
    if (k >= 4 && out.size() != 2) latency_ok = false;
  }
  const auto rest = dec.flush();
  latency_ok = latency_ok && filtered == 96 && rest.size() == 4 && rest.front().frame_index == 96;
  const double budget = radar.frame_duration();
  const double mean = total / 100.0;
  return {latency_ok && worst < budget,
          fmt("%zu filtered in-stream + %zu flushed, latency %zu frames; per-frame mean %.2f ms, max %.2f ms "
              "(budget %.0f ms)",
              filtered, rest.size(), dec.latency_frames(), 1e3 * mean, 1e3 * worst, 1e3 * budget)};
}

Outcome median_filter_properties() {
  int spikes = 0, spike_ok = 0;
  for (std::size_t pos = 1; pos + 1 < 40; ++pos) {
    std::vector<std::optional<double>> x(40, 1.25);
    x[pos] = -7.0;
    ++spikes;
    const auto y = median_filter(x, 9);
    bool ok = true;
    for (const auto &v : y) ok = ok && v == 1.25;
    spike_ok += ok;
  }
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> step(0.0, 1.0);
  int mono_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::optional<double>> x(static_cast<std::size_t>(10 + trial));
    double level = -3.0;
    for (auto &v : x) v = level += step(rng) < 0.3 ? 0.0 : step(rng);
    const auto y = median_filter(x, 9);
    bool ok = true;
    for (std::size_t i = 1; i < y.size(); ++i) ok = ok && *y[i] >= *y[i - 1];
    mono_ok += ok;
  }
  return {spike_ok == spikes && mono_ok == 100,
          fmt("spikes removed %d/%d; monotone preserved %d/100", spike_ok, spikes, mono_ok)};
}

Outcome end_to_end_determinism() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / ("mdl_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  const std::string config = std::string(MDL_SOURCE_DIR) + "/configs/model-b.ini";
  std::string files;
  bool ok = true;
  for (const char *run : {"a", "b"}) {
    const std::string cmd = std::string("MDL_LOG=error \"") + MDL_TOOL_PATH + "\" all --config \"" + config +
                            "\" --out \"" + (base / run).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "mdl all failed: " + cmd};
  }
  for (const char *f : {"features.csv", "tree.json", "envelopes.csv"}) {
    const auto a = read_text(base / "a" / f);
    const auto b = read_text(base / "b" / f);
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    files += fmt(" %s %s (%zu bytes)", f, same ? "identical" : "DIFFER", a.size());
  }
  fs::remove_all(base);
  return {ok, "two runs:" + files};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
      {"RCS identities", rcs_identities},
      {"radar arithmetic", radar_arithmetic},
      {"point-target localization", point_target},
      {"Otsu oracle equivalence", otsu_oracle},
      {"gamma fixed points and value", gamma_values},
      {"gait anchors", gait_anchors},
      {"classifier memorization and oracle", classifier},
      {"qualitative confusion-matrix reproduction", table_reproduction},
      {"streaming contract", streaming_contract},
      {"median filter", median_filter_properties},
      {"end-to-end determinism", end_to_end_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("Criterion %zu (%s): %s - %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}

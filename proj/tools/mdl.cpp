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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mdl/confusion.hpp"
#include "mdl/error.hpp"
#include "mdl/io.hpp"
#include "mdl/pipeline.hpp"
#include "mdl/scenario.hpp"
#include "mdl/strings.hpp"
#include "mdl/tree.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char *env = std::getenv("MDL_LOG");
    const std::string v = env ? env : "info";
    if (v == "error" || v == "quiet") return LogLevel::kError;
    if (v == "warn") return LogLevel::kWarn;
    if (v == "debug") return LogLevel::kDebug;
    return LogLevel::kInfo;
  }();
  return level;
}

void log(LogLevel level, const std::string &msg) {
  static std::mutex m;
  if (level > log_level()) return;
  static constexpr const char *kNames[] = {"error", "warn", "info", "debug"};
  std::lock_guard lock(m);
  std::cerr << "[mdl " << kNames[static_cast<int>(level)] << "] " << msg << '\n';
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;
  std::optional<std::string> preset;
  std::optional<int> parallel;
  bool plot = false;
  bool no_threshold = false;
  bool continue_on_error = false;
  std::optional<std::string> frames_dir;
  std::optional<std::string> features;
  std::optional<std::string> tree;
};

void add_common(CLI::App *cmd, Options &o) {
  cmd->add_option("--config", o.config, "scenario config file")->required();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "seed for gait phase, noise, split and tree");
  cmd->add_option("--gamma", o.gamma, "gamma exponent of the power removal stage");
  cmd->add_option("--preset", o.preset, "scenario preset")->check(CLI::IsMember({"model-a", "model-b"}));
  cmd->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--plot", o.plot, "write plot-ready CSV exports");
}

mdl::Scenario load(const Options &o) {
  mdl::ScenarioOverrides ov;
  if (o.out) ov.output_dir = *o.out;
  ov.seed = o.seed;
  ov.gamma = o.gamma;
  if (o.preset) ov.preset = mdl::parse_preset(*o.preset);
  ov.parallel = o.parallel;
  ov.plot = o.plot;
  auto s = mdl::load_scenario(o.config, ov);
  if (o.no_threshold) s.processing.threshold = false;
  return s;
}

void ensure_dir(const fs::path &p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw mdl::IoError("cannot create directory " + p.string() + ": " + ec.message());
}

// Runs body(i) for i in [0, n) on `workers` threads; the first error (by
// index) is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t n, int workers, Body body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex m;
  std::optional<std::size_t> failed_index;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<int>(workers, static_cast<int>(n)); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failed_index || i < *failed_index) {
            failed_index = i;
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

class ManifestBuilder {
 public:
  ManifestBuilder(const mdl::Scenario &s) : dir_(s.output_dir) {
    manifest_.config_hash = s.hash();
    // Keep stages recorded by earlier commands of the same configuration.
    const auto path = dir_ / "manifest.json";
    std::error_code ec;
    if (!fs::exists(path, ec)) return;
    try {
      const auto j = nlohmann::json::parse(mdl::read_text(path));
      char hash[24];
      std::snprintf(hash, sizeof hash, "%016llx",
                    static_cast<unsigned long long>(manifest_.config_hash));
      if (j.value("config_hash", "") != std::string("fnv1a64:") + hash) return;
      for (const auto &st : j.at("stages"))
        manifest_.stages.push_back({st.at("name").get<std::string>(),
                                    st.at("files").get<std::vector<std::string>>(),
                                    st.at("seconds").get<double>()});
    } catch (const std::exception &) {
      manifest_.stages.clear();
    }
  }

  void record(mdl::StageRecord stage) {
    std::erase_if(manifest_.stages, [&](const auto &s) { return s.name == stage.name; });
    manifest_.stages.push_back(std::move(stage));
  }

  void write() const {
    ensure_dir(dir_);
    manifest_.write(dir_);
  }

 private:
  fs::path dir_;
  mdl::RunManifest manifest_;
};

std::string rel(const fs::path &p, const fs::path &base) {
  return p.lexically_relative(base).generic_string();
}

fs::path frames_dir(const mdl::Scenario &s, const Options &o) {
  return o.frames_dir ? fs::path(*o.frames_dir) : s.output_dir / "frames";
}

// --- simulate -------------------------------------------------------------

void cmd_simulate(const mdl::Scenario &s, ManifestBuilder &manifest) {
  const auto t0 = Clock::now();
  const auto traj = mdl::scenario_trajectory(s);
  const auto shapes = mdl::scenario_shapes(s, traj);
  const auto n = mdl::frame_count(traj, s.radar);
  if (n < 1)
    throw mdl::ConfigError("duration " + mdl::format_double(traj.end_time() - traj.start_time()) +
                           " s is shorter than one frame (" +
                           mdl::format_double(s.radar.frame_duration()) + " s)");
  const auto dir = s.output_dir;
  const auto fdir = dir / "frames";
  ensure_dir(fdir);
  mdl::StageRecord stage{"simulate", {}, 0.0};
  mdl::write_trajectory_csv(dir / "trajectory.csv", traj);
  stage.files.push_back("trajectory.csv");
  parallel_for(static_cast<std::size_t>(n), s.parallel, [&](std::size_t k) {
    const double start = traj.start_time() + static_cast<double>(k) * s.radar.frame_duration();
    const auto frame = mdl::synth_frame(traj, shapes, s.radar, start, mdl::all_segments());
    mdl::write_frame(fdir / mdl::frame_file_name(k), frame);
  });
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto bin = fdir / mdl::frame_file_name(static_cast<std::size_t>(k));
    stage.files.push_back(rel(bin, dir));
    stage.files.push_back(rel(mdl::meta_path(bin), dir));
  }
  stage.seconds = seconds_since(t0);
  manifest.record(stage);
  log(LogLevel::kInfo, "simulate: wrote " + std::to_string(n) + " frames to " + fdir.string());
}

// --- process --------------------------------------------------------------

void cmd_process(const mdl::Scenario &s, const Options &o, ManifestBuilder &manifest) {
  const auto t0 = Clock::now();
  const auto dir = s.output_dir;
  const auto files = mdl::list_frames(frames_dir(s, o));
  if (files.empty()) throw mdl::IoError("no frame files in " + frames_dir(s, o).string());
  ensure_dir(dir / "maps");
  ensure_dir(dir / "masks");

  std::optional<mdl::Trajectory> traj;
  std::optional<mdl::ShapeTable> shapes;
  std::error_code ec;
  if (fs::exists(dir / "trajectory.csv", ec)) {
    traj = mdl::read_trajectory_csv(dir / "trajectory.csv");
    shapes = mdl::scenario_shapes(s, *traj);
  } else {
    log(LogLevel::kWarn, "process: no trajectory.csv; features will be unlabelled");
  }

  struct Slot {
    std::vector<mdl::FeatureSample> samples;
    bool ok = false;
    std::string error;
  };
  std::vector<Slot> slots(files.size());
  parallel_for(files.size(), s.parallel, [&](std::size_t k) {
    try {
      const auto frame = mdl::read_frame(files[k], s.radar);
      auto processed = mdl::process_frame(frame, k, s.processing);
      char name[32];
      std::snprintf(name, sizeof name, "map_%06zu.bin", k);
      mdl::write_map(dir / "maps" / name, processed.map);
      std::snprintf(name, sizeof name, "mask_%06zu.bin", k);
      mdl::write_mask(dir / "masks" / name, processed.mask.mask,
                      {{"threshold", processed.mask.threshold}});
      if (traj)
        slots[k].samples = mdl::label_from_trajectory(processed.samples, *traj, *shapes, s.radar,
                                                      frame.start_time);
      else
        slots[k].samples = std::move(processed.samples);
      slots[k].ok = true;
    } catch (const mdl::Error &e) {
      if (!o.continue_on_error) throw mdl::FrameError(e, k);
      slots[k].error = e.what();
    }
  });

  mdl::StageRecord stage{"process", {}, 0.0};
  std::vector<mdl::FeatureSample> all;
  std::size_t failed = 0;
  for (std::size_t k = 0; k < files.size(); ++k) {
    if (!slots[k].ok) {
      ++failed;
      log(LogLevel::kError, files[k].string() + ": " + slots[k].error);
      continue;
    }
    char name[32];
    std::snprintf(name, sizeof name, "maps/map_%06zu.bin", k);
    stage.files.push_back(name);
    std::snprintf(name, sizeof name, "masks/mask_%06zu.bin", k);
    stage.files.push_back(name);
    all.insert(all.end(), slots[k].samples.begin(), slots[k].samples.end());
  }
  mdl::write_features_csv(dir / "features.csv", all);
  stage.files.push_back("features.csv");
  stage.seconds = seconds_since(t0);
  manifest.record(stage);
  log(LogLevel::kInfo, "process: " + std::to_string(files.size() - failed) + " frames, " +
                           std::to_string(all.size()) + " feature samples" +
                           (failed ? ", " + std::to_string(failed) + " frames failed" : ""));
}

// --- train-eval -----------------------------------------------------------

void cmd_train_eval(const mdl::Scenario &s, const Options &o, ManifestBuilder &manifest) {
  const auto t0 = Clock::now();
  const auto dir = s.output_dir;
  const fs::path features_path = o.features ? fs::path(*o.features) : dir / "features.csv";
  const auto samples = mdl::read_features_csv(features_path);
  for (const auto &smp : samples)
    if (!smp.label)
      throw mdl::DataError(features_path.string() +
                           ": features are unlabelled; run `mdl process` with the simulation's "
                           "trajectory.csv in the output directory to label them");
  ensure_dir(dir);
  const auto [train, validation] = mdl::split_dataset(samples, s.train_fraction, s.tree.seed);
  const auto tree = mdl::DecisionTree::train(train, s.tree);
  std::vector<mdl::LimbClass> truth, predicted;
  for (const auto &v : validation) {
    truth.push_back(*v.label);
    predicted.push_back(tree.predict(v));
  }
  const auto cm = mdl::confusion_matrix(truth, predicted);
  const auto table = mdl::format_confusion(cm);
  tree.save((dir / "tree.json").string());
  mdl::write_text(dir / "confusion.csv", mdl::confusion_csv(cm));
  std::string report = "samples: " + std::to_string(samples.size()) + " (train " +
                       std::to_string(train.size()) + ", validation " +
                       std::to_string(validation.size()) + ")\n" + "tree: depth " +
                       std::to_string(tree.depth()) + ", " + std::to_string(tree.leaf_count()) +
                       " leaves\n" + "accuracy: " + mdl::format_double(100.0 * cm.accuracy()) +
                       "%\n" + table;
  mdl::write_text(dir / "report.txt", report);
  std::cout << report;
  manifest.record({"train-eval", {"tree.json", "confusion.csv", "report.txt"}, seconds_since(t0)});
}

// --- decompose ------------------------------------------------------------

Eigen::VectorXcd slow_time_signal(const std::vector<mdl::ChirpFrame> &frames) {
  Eigen::Index total = 0;
  for (const auto &f : frames) total += f.data.cols();
  Eigen::VectorXcd x(total);
  Eigen::Index k = 0;
  for (const auto &f : frames)
    for (Eigen::Index j = 0; j < f.data.cols(); ++j) x(k++) = f.data.col(j).sum();
  return x;
}

void cmd_decompose(const mdl::Scenario &s, const Options &o, ManifestBuilder &manifest) {
  const auto t0 = Clock::now();
  const auto dir = s.output_dir;
  const fs::path tree_path = o.tree ? fs::path(*o.tree) : dir / "tree.json";
  const auto tree = mdl::DecisionTree::load(tree_path.string());
  const auto files = mdl::list_frames(frames_dir(s, o));
  if (files.empty()) throw mdl::IoError("no frame files in " + frames_dir(s, o).string());

  ensure_dir(dir);
  mdl::StreamDecomposer decomposer(tree, s.processing, s.median_order);
  std::vector<mdl::EnvelopeEmission> raw, filtered;
  std::vector<double> latency;
  std::vector<mdl::ChirpFrame> kept;
  for (std::size_t k = 0; k < files.size(); ++k) {
    const auto frame = mdl::read_frame(files[k], s.radar);
    const auto start = Clock::now();
    const auto out = decomposer.push(frame);
    latency.push_back(seconds_since(start));
    for (const auto &e : out) (e.filtered ? filtered : raw).push_back(e);
    if (s.plot) kept.push_back(frame);
  }
  for (const auto &e : decomposer.flush()) filtered.push_back(e);

  std::vector<mdl::EnvelopeEmission> rows;
  rows.reserve(raw.size() + filtered.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    rows.push_back(raw[k]);
    if (k < filtered.size()) rows.push_back(filtered[k]);
  }
  mdl::write_envelopes_csv(dir / "envelopes.csv", rows);
  mdl::StageRecord stage{"decompose", {"envelopes.csv"}, 0.0};

  if (s.half_cycle) {
    std::vector<mdl::FrameEnvelopes> env;
    std::vector<double> times;
    for (const auto &e : filtered) {
      env.push_back(e.envelopes);
      times.push_back(e.time);
    }
    const auto sides = mdl::disambiguate_sides(env, times, *s.half_cycle, times.front());
    std::string text = "frame,time_s,class,side_a_mps,side_b_mps\n";
    for (std::size_t k = 0; k < sides.size(); ++k)
      for (auto c : mdl::kAllLimbClasses) {
        const auto i = static_cast<std::size_t>(c);
        if (!sides[k].side_a[i]) continue;
        text += std::to_string(filtered[k].frame_index) + ',' + mdl::format_double(times[k]) + ',' +
                std::string(mdl::limb_class_name(c)) + ',' + mdl::format_double(*sides[k].side_a[i]) +
                ',' + mdl::format_double(*sides[k].side_b[i]) + '\n';
      }
    mdl::write_text(dir / "sides.csv", text);
    stage.files.push_back("sides.csv");
  }
  if (s.plot) {
    const auto sg = mdl::stft_spectrogram(slow_time_signal(kept), 1.0 / s.radar.chirp_duration,
                                          s.processing.stft, s.radar.carrier_frequency);
    mdl::write_spectrogram_csv(dir / "spectrogram.csv", sg);
    stage.files.push_back("spectrogram.csv");
  }

  double mean = 0.0, worst = 0.0;
  for (double l : latency) {
    mean += l;
    worst = std::max(worst, l);
  }
  mean /= static_cast<double>(latency.size());
  const double budget = s.radar.frame_duration();
  char line[256];
  std::snprintf(line, sizeof line,
                "decompose: %zu frames, %zu filtered emissions, latency %zu frames (%.3f s); "
                "processing mean %.3f ms, max %.3f ms, budget %.1f ms per frame: %s\n",
                files.size(), filtered.size(), decomposer.latency_frames(),
                static_cast<double>(decomposer.latency_frames()) * budget, mean * 1e3, worst * 1e3,
                budget * 1e3, mean < budget ? "within budget" : "OVER budget");
  std::cout << line;
  stage.seconds = seconds_since(t0);
  manifest.record(stage);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Micro-Doppler limb decomposition toolkit"};
  app.set_version_flag("--version", std::string(mdl::kToolVersion));
  app.require_subcommand(1);
  Options o;
  auto *simulate = app.add_subcommand("simulate", "synthesize trajectory and radar frames");
  auto *process = app.add_subcommand("process", "range-Doppler maps, masks and features");
  auto *train = app.add_subcommand("train-eval", "train the classifier and report the confusion matrix");
  auto *decompose = app.add_subcommand("decompose", "streaming envelope decomposition");
  auto *all = app.add_subcommand("all", "simulate, process, train-eval and decompose");
  for (auto *cmd : {simulate, process, train, decompose, all}) add_common(cmd, o);
  for (auto *cmd : {process, all}) {
    cmd->add_flag("--no-threshold", o.no_threshold, "use every non-empty cell (debug)");
    cmd->add_flag("--continue-on-error", o.continue_on_error, "skip unreadable frames");
  }
  for (auto *cmd : {process, decompose}) cmd->add_option("--frames", o.frames_dir, "frame directory");
  train->add_option("--features", o.features, "feature CSV");
  decompose->add_option("--tree", o.tree, "tree JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(mdl::ErrorCode::kConfig);
  }

  try {
    const auto s = load(o);
    ManifestBuilder manifest(s);
    if (simulate->parsed() || all->parsed()) cmd_simulate(s, manifest);
    if (process->parsed() || all->parsed()) cmd_process(s, o, manifest);
    if (train->parsed() || all->parsed()) cmd_train_eval(s, o, manifest);
    if (decompose->parsed() || all->parsed()) cmd_decompose(s, o, manifest);
    manifest.write();
    return 0;
  } catch (const mdl::Error &e) {
    log(LogLevel::kError, e.what());
    return e.exit_code();
  } catch (const fs::filesystem_error &e) {
    log(LogLevel::kError, e.what());
    return static_cast<int>(mdl::ErrorCode::kIo);
  } catch (const std::exception &e) {
    log(LogLevel::kError, std::string("internal error: ") + e.what());
    return 1;
  }
}

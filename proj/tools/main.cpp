// Copyright 2026 The SMS Preprocessing Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sms/error.hpp"
#include "sms/geometry.hpp"
#include "sms/pipeline.hpp"
#include "sms/point_cloud.hpp"
#include "sms/synthetic.hpp"
#include "sms/version.hpp"

namespace fs = std::filesystem;

namespace {

int run_command(const sms::RunOptions& opts) {
  const sms::RunResult r = sms::run_pipeline(opts);
  if (r.error_record) std::cerr << *r.error_record << '\n';
  if (r.exit_code == sms::ExitCode::kOk) {
    std::cerr << "wrote " << r.frames_written << " frame(s)";
    if (r.frames_skipped > 0) std::cerr << ", skipped " << r.frames_skipped;
    std::cerr << '\n';
  }
  return static_cast<int>(r.exit_code);
}

int validate_command(const fs::path& config) {
  const sms::ValidationReport report = sms::validate_config_file(config);
  if (report.valid()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& v : report.violations) std::cout << v << '\n';
  return 1;
}

int synth_command(const fs::path& out, std::size_t frames, std::uint64_t seed, double density) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "cannot create " << out << '\n';
    return 2;
  }
  sms::SceneParams params;
  params.density_scale = density;
  for (std::size_t i = 0; i < frames; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%06zu", i);
    const auto frame = sms::make_scene(params, sms::derive_seed(sms::SampleSeed{seed}, id));
    try {
      sms::save_frame(out / (std::string(id) + ".bin"), frame.cloud);
      const std::string labels = sms::format_labels(frame.labels);
      sms::write_file_atomic(out / (std::string(id) + ".txt"),
                             std::as_bytes(std::span(labels.data(), labels.size())));
    } catch (const sms::Error& e) {
      std::cerr << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view point cloud sampling for 3D detection"};
  app.set_version_flag("--version", std::string(sms::kVersion));
  app.require_subcommand(1);

  sms::RunOptions opts;
  std::string config, input, output, stages, preset;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  auto* run = app.add_subcommand("run", "Sample every frame of a directory");
  run->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--input", input, "Directory of <frame_id>.bin frames")->required();
  auto* out_opt = run->add_option("--output", output, "Output directory");
  auto* stages_opt = run->add_option("--stages", stages, "Comma list of sms, ckps, stats");
  auto* seed_opt = run->add_option("--seed", seed, "Run seed");
  auto* preset_opt = run->add_option("--preset", preset, "kitti, wod or custom");
  run->add_flag("--keep-going", opts.keep_going, "Skip failing frames instead of stopping");
  run->add_flag("--emit-stats", opts.emit_stats, "Also run the stats stage");
  auto* workers_opt = run->add_option("--workers", workers, "Parallel frame workers")
                          ->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config file and list every violation");
  validate->add_option("config", validate_path, "JSON config file")->required();

  std::string synth_out;
  std::size_t synth_frames = 8;
  std::uint64_t synth_seed = 0;
  double synth_density = sms::SceneParams{}.density_scale;
  auto* synth = app.add_subcommand("synth", "Write a synthetic labelled corpus");
  synth->add_option("--output", synth_out, "Output directory")->required();
  synth->add_option("--frames", synth_frames, "Number of frames");
  synth->add_option("--seed", synth_seed, "Corpus seed");
  synth->add_option("--density", synth_density, "Ground density scale");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    if (!config.empty()) opts.config_path = config;
    opts.input_dir = input;
    if (*out_opt) opts.output_dir = output;
    if (*stages_opt) {
      opts.stages = sms::parse_stages(stages);
      if (!opts.stages) {
        std::cerr << R"({"error":{"category":"config","code":"InvalidConfig","message":"bad --stages list"}})"
                  << '\n';
        return 1;
      }
    }
    if (*seed_opt) opts.seed = seed;
    if (*preset_opt) opts.preset = preset;
    if (*workers_opt) opts.workers = workers;
    return run_command(opts);
  }
  if (*validate) return validate_command(validate_path);
  return synth_command(synth_out, synth_frames, synth_seed, synth_density);
}

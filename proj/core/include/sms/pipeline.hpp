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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sms/analysis.hpp"
#include "sms/branches.hpp"

namespace sms {

struct Stages {
  bool sms = true;
  bool ckps = true;
  bool stats = false;

  friend bool operator==(const Stages&, const Stages&) = default;
};

/// Fully resolved pipeline settings (preset expanded, overrides applied).
struct PipelineConfig {
  std::string preset = "kitti";
  BranchConfig branches = BranchConfig::kitti();
  RegionSplit regions{};
  std::uint64_t seed = 0;
  Stages stages{};
  std::vector<std::string> emit{"csv", "json"};
  std::filesystem::path output_dir = "sms_out";
  std::size_t workers = 1;

  /// Every violated invariant across all sub-configs.
  std::vector<std::string> violations() const;
};

/// Config document as parsed, with any problems found while reading it.
struct ConfigParse {
  PipelineConfig config;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Parses a JSON config document. `preset_override` replaces the
/// document's "preset" as the base the overrides are applied on. All
/// problems (syntax, unknown keys, wrong types, invariant violations) are
/// collected, not just the first.
ConfigParse parse_config(std::string_view text,
                         std::optional<std::string> preset_override = std::nullopt);

/// Preset with no overrides: "kitti" or "wod".
std::optional<PipelineConfig> preset_config(std::string_view name);

/// Canonical JSON of the settings that determine outputs (no output path,
/// no worker count), keys in fixed order.
std::string canonical_config_json(const PipelineConfig& cfg);

/// "sha256:<hex>" over canonical_config_json.
std::string config_hash(const PipelineConfig& cfg);

std::string sha256_hex(std::string_view data);

struct ValidationReport {
  std::vector<std::string> violations;
  bool valid() const noexcept { return violations.empty(); }
};

ValidationReport validate_config_file(const std::filesystem::path& path);

/// Process exit codes of the batch runner.
enum class ExitCode : int { kOk = 0, kConfigError = 1, kIoError = 2, kFrameError = 3 };

struct RunOptions {
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path input_dir;
  std::optional<std::filesystem::path> output_dir;
  std::optional<Stages> stages;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  bool keep_going = false;
  bool emit_stats = false;
  std::optional<std::size_t> workers;
};

struct RunResult {
  ExitCode exit_code = ExitCode::kOk;
  /// Structured JSON error record on failure.
  std::optional<std::string> error_record;
  std::size_t frames_written = 0;
  std::size_t frames_skipped = 0;
};

/// Parses a comma-separated stage list such as "sms,ckps,stats".
std::optional<Stages> parse_stages(std::string_view list);

/// Batch runner. Per frame `<id>.bin` in the input directory writes
/// `<out>/<id>/{pv1,pv2,pv3}.bin`, optionally `ckps.mask` + `ckps.json`,
/// and finally `<out>/manifest.json`. With the stats stage, label files
/// `<id>.txt` next to the frames feed `<out>/stats/`. Outputs do not depend
/// on the worker count.
RunResult run_pipeline(const RunOptions& options);

}  // namespace sms

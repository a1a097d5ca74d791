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

#include "sms/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <json.hpp>

#include "sms/error.hpp"
#include "sms/version.hpp"

namespace sms {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

// Collects type and key problems instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

  void keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [k, _] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
        issues_.push_back(where + ": unknown key '" + k + "'");
      }
    }
  }

  bool object(const json& j, const std::string& where) {
    if (j.is_object()) return true;
    issues_.push_back(where + ": expected an object");
    return false;
  }

  void number(const json& obj, const std::string& where, const char* key, double& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else {
      issues_.push_back(where + "." + key + ": expected a number");
    }
  }

  template <typename U>
  void unsigned_int(const json& obj, const std::string& where, const char* key, U& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) {
      out = static_cast<U>(v.get<std::uint64_t>());
    } else {
      issues_.push_back(where + "." + key + ": expected a non-negative integer");
    }
  }

  void boolean(const json& obj, const std::string& where, const char* key, bool& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_boolean()) {
      out = v.get<bool>();
    } else {
      issues_.push_back(where + "." + key + ": expected true or false");
    }
  }

  void string_list(const json& obj, const std::string& where, const char* key,
                   std::vector<std::string>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); })) {
      issues_.push_back(where + "." + key + ": expected a list of strings");
      return;
    }
    out = v.get<std::vector<std::string>>();
  }

  void ring_list(const json& obj, const std::string& where, const char* key,
                 std::vector<std::uint32_t>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array() ||
        !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_unsigned(); })) {
      issues_.push_back(where + "." + key + ": expected a list of ring numbers");
      return;
    }
    out = v.get<std::vector<std::uint32_t>>();
  }

 private:
  std::vector<std::string>& issues_;
};

ojson stages_json(const Stages& s) {
  ojson a = ojson::array();
  if (s.sms) a.push_back("sms");
  if (s.ckps) a.push_back("ckps");
  if (s.stats) a.push_back("stats");
  return a;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::as_bytes(std::span(text.data(), text.size())));
}

std::string error_record(std::string_view category, std::string_view code, const std::string& message,
                         const std::string& frame_id = {},
                         const std::vector<std::string>& violations = {}) {
  ojson e;
  e["category"] = category;
  e["code"] = code;
  e["message"] = message;
  if (!frame_id.empty()) e["frame_id"] = frame_id;
  if (!violations.empty()) e["violations"] = violations;
  ojson rec;
  rec["error"] = std::move(e);
  return rec.dump();
}

}  // namespace

std::vector<std::string> PipelineConfig::violations() const {
  std::vector<std::string> v = branches.violations();
  if (branches.des.violations().empty()) {
    const auto r = regions.violations(branches.des.num_rings());
    v.insert(v.end(), r.begin(), r.end());
  }
  if (stages.ckps && !stages.sms) v.push_back("stages: ckps requires sms");
  if (!stages.sms && !stages.stats) v.push_back("stages: nothing to do");
  for (const auto& e : emit) {
    if (e != "csv" && e != "json" && e != "table") {
      v.push_back("emit: unknown format '" + e + "' (csv, json, table)");
    }
  }
  if (workers == 0) v.push_back("workers must be >= 1");
  return v;
}

std::optional<PipelineConfig> preset_config(std::string_view name) {
  PipelineConfig c;
  if (name == "kitti") {
    c.branches = BranchConfig::kitti();
  } else if (name == "wod") {
    c.branches = BranchConfig::wod();
  } else {
    return std::nullopt;
  }
  c.preset = std::string(name);
  c.regions = RegionSplit::default_for(c.branches.des.num_rings());
  return c;
}

ConfigParse parse_config(std::string_view text, std::optional<std::string> preset_override) {
  ConfigParse out;
  auto& issues = out.violations;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    issues.push_back(std::string("config is not valid JSON: ") + e.what());
    return out;
  }
  Reader rd(issues);
  if (!rd.object(doc, "config")) return out;
  rd.keys(doc, "config",
          {"schema_version", "preset", "n_p", "seed", "crop", "des", "gas", "ckps", "regions",
           "stages", "emit", "output", "workers"});

  if (doc.contains("schema_version")) {
    const json& sv = doc["schema_version"];
    if (!sv.is_number_unsigned() || sv.get<int>() != kSchemaVersion) {
      issues.push_back("schema_version: only version 1 is supported");
    }
  }

  std::string preset = "kitti";
  if (doc.contains("preset")) {
    if (doc["preset"].is_string()) {
      preset = doc["preset"].get<std::string>();
    } else {
      issues.push_back("preset: expected a string");
    }
  }
  if (preset_override) preset = *preset_override;
  // "custom" starts from the kitti values; every field is expected to be overridden as needed.
  auto base = preset_config(preset == "custom" ? "kitti" : preset);
  if (!base) {
    issues.push_back("preset: unknown preset '" + preset + "' (kitti, wod, custom)");
    return out;
  }
  PipelineConfig& c = out.config = *base;
  c.preset = preset;
  BranchConfig& b = c.branches;

  rd.unsigned_int(doc, "config", "n_p", b.n_p);
  rd.unsigned_int(doc, "config", "seed", c.seed);
  rd.unsigned_int(doc, "config", "workers", c.workers);
  if (doc.contains("output")) {
    if (doc["output"].is_string()) {
      c.output_dir = doc["output"].get<std::string>();
    } else {
      issues.push_back("output: expected a path string");
    }
  }

  if (doc.contains("crop") && rd.object(doc["crop"], "crop")) {
    const json& j = doc["crop"];
    rd.keys(j, "crop", {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"});
    rd.number(j, "crop", "x_min", b.crop.x_min);
    rd.number(j, "crop", "x_max", b.crop.x_max);
    rd.number(j, "crop", "y_min", b.crop.y_min);
    rd.number(j, "crop", "y_max", b.crop.y_max);
    rd.number(j, "crop", "z_min", b.crop.z_min);
    rd.number(j, "crop", "z_max", b.crop.z_max);
  }
  if (doc.contains("des") && rd.object(doc["des"], "des")) {
    const json& j = doc["des"];
    rd.keys(j, "des",
            {"tau_far", "d_t", "mu", "rho_s", "rho_m", "rho_l", "s1", "s2", "s3", "tau_z_min",
             "tau_z_max", "jitter"});
    DesConfig& d = b.des;
    rd.number(j, "des", "tau_far", d.tau_far);
    rd.number(j, "des", "d_t", d.d_t);
    rd.number(j, "des", "mu", d.mu);
    rd.number(j, "des", "rho_s", d.rho_s);
    rd.number(j, "des", "rho_m", d.rho_m);
    rd.number(j, "des", "rho_l", d.rho_l);
    rd.number(j, "des", "s1", d.s1);
    rd.number(j, "des", "s2", d.s2);
    rd.number(j, "des", "s3", d.s3);
    rd.number(j, "des", "tau_z_min", d.tau_z_min);
    rd.number(j, "des", "tau_z_max", d.tau_z_max);
    rd.number(j, "des", "jitter", d.jitter);
  }
  if (doc.contains("gas") && rd.object(doc["gas"], "gas")) {
    const json& j = doc["gas"];
    rd.keys(j, "gas", {"x_s", "x_l", "y_s", "y_l", "x_t", "y_t", "tau_h", "passthrough_outside"});
    GasConfig& g = b.gas;
    rd.number(j, "gas", "x_s", g.x_s);
    rd.number(j, "gas", "x_l", g.x_l);
    rd.number(j, "gas", "y_s", g.y_s);
    rd.number(j, "gas", "y_l", g.y_l);
    rd.number(j, "gas", "x_t", g.x_t);
    rd.number(j, "gas", "y_t", g.y_t);
    rd.number(j, "gas", "tau_h", g.tau_h);
    rd.boolean(j, "gas", "passthrough_outside", g.passthrough_outside);
  }
  bool origin_given = false;
  if (doc.contains("ckps") && rd.object(doc["ckps"], "ckps")) {
    const json& j = doc["ckps"];
    rd.keys(j, "ckps", {"voxel_size", "tau_v", "origin"});
    rd.number(j, "ckps", "voxel_size", b.ckps.voxel_size);
    rd.number(j, "ckps", "tau_v", b.ckps.tau_v);
    if (j.contains("origin")) {
      const json& o = j["origin"];
      if (o.is_array() && o.size() == 3 &&
          std::all_of(o.begin(), o.end(), [](const json& e) { return e.is_number(); })) {
        for (std::size_t k = 0; k < 3; ++k) b.ckps.origin[k] = o[k].get<double>();
        origin_given = true;
      } else {
        issues.push_back("ckps.origin: expected [x, y, z]");
      }
    }
  }
  // The voxel grid follows the crop unless pinned explicitly.
  if (!origin_given) b.ckps.origin = {b.crop.x_min, b.crop.y_min, b.crop.z_min};

  bool regions_given = false;
  if (doc.contains("regions") && rd.object(doc["regions"], "regions")) {
    const json& j = doc["regions"];
    rd.keys(j, "regions", {"hd", "ld"});
    rd.ring_list(j, "regions", "hd", c.regions.hd);
    rd.ring_list(j, "regions", "ld", c.regions.ld);
    regions_given = true;
  }
  if (!regions_given && b.des.violations().empty()) {
    c.regions = RegionSplit::default_for(b.des.num_rings());
  }

  if (doc.contains("stages")) {
    std::vector<std::string> list;
    rd.string_list(doc, "config", "stages", list);
    Stages s{false, false, false};
    for (const auto& name : list) {
      if (name == "sms") {
        s.sms = true;
      } else if (name == "ckps") {
        s.ckps = true;
      } else if (name == "stats") {
        s.stats = true;
      } else {
        issues.push_back("stages: unknown stage '" + name + "' (sms, ckps, stats)");
      }
    }
    c.stages = s;
  }
  rd.string_list(doc, "config", "emit", c.emit);

  const auto v = c.violations();
  issues.insert(issues.end(), v.begin(), v.end());
  return out;
}

std::string canonical_config_json(const PipelineConfig& cfg) {
  const BranchConfig& b = cfg.branches;
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["preset"] = cfg.preset;
  j["n_p"] = b.n_p;
  j["seed"] = cfg.seed;
  j["crop"] = {{"x_min", b.crop.x_min}, {"x_max", b.crop.x_max}, {"y_min", b.crop.y_min},
               {"y_max", b.crop.y_max}, {"z_min", b.crop.z_min}, {"z_max", b.crop.z_max}};
  const DesConfig& d = b.des;
  j["des"] = {{"tau_far", d.tau_far}, {"d_t", d.d_t},       {"mu", d.mu},
              {"rho_s", d.rho_s},     {"rho_m", d.rho_m},   {"rho_l", d.rho_l},
              {"s1", d.s1},           {"s2", d.s2},         {"s3", d.s3},
              {"tau_z_min", d.tau_z_min}, {"tau_z_max", d.tau_z_max}, {"jitter", d.jitter}};
  const GasConfig& g = b.gas;
  j["gas"] = {{"x_s", g.x_s}, {"x_l", g.x_l}, {"y_s", g.y_s}, {"y_l", g.y_l},
              {"x_t", g.x_t}, {"y_t", g.y_t}, {"tau_h", g.tau_h},
              {"passthrough_outside", g.passthrough_outside}};
  j["ckps"] = {{"voxel_size", b.ckps.voxel_size},
               {"tau_v", b.ckps.tau_v},
               {"origin", b.ckps.origin}};
  j["regions"] = {{"hd", cfg.regions.hd}, {"ld", cfg.regions.ld}};
  j["stages"] = stages_json(cfg.stages);
  j["emit"] = cfg.emit;
  return j.dump();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  static constexpr char kDigits[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex += kDigits[digest[i] >> 4];
    hex += kDigits[digest[i] & 0xF];
  }
  return hex;
}

std::string config_hash(const PipelineConfig& cfg) {
  return "sha256:" + sha256_hex(canonical_config_json(cfg));
}

ValidationReport validate_config_file(const fs::path& path) {
  ValidationReport r;
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    r.violations.push_back(e.what());
    return r;
  }
  r.violations = parse_config(text).violations;
  return r;
}

std::optional<Stages> parse_stages(std::string_view list) {
  Stages s{false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t end = std::min(list.find(',', pos), list.size());
    const std::string_view name = list.substr(pos, end - pos);
    if (name == "sms") {
      s.sms = true;
    } else if (name == "ckps") {
      s.ckps = true;
    } else if (name == "stats") {
      s.stats = true;
    } else {
      return std::nullopt;
    }
    pos = end + 1;
  }
  return s;
}

namespace {

struct FrameRecord {
  std::string frame_id;
  std::size_t raw = 0, cropped = 0, pv1 = 0, pv2 = 0, pv3 = 0;
  std::optional<std::size_t> keypoints;
  // [op][region], filled only with the stats stage.
  std::array<std::array<RegionTally, 2>, 4> tallies{};
  std::vector<std::size_t> rings_before, rings_after;
};

struct FrameFailure {
  std::string frame_id;
  std::string code;
  std::string message;
};

FrameRecord process_frame(const fs::path& path, const PipelineConfig& cfg, const fs::path& out_dir) {
  FrameRecord rec;
  const PointCloud raw = load_frame(path);
  rec.frame_id = raw.frame_id;
  rec.raw = raw.size();

  std::optional<std::vector<Box7>> gt;
  if (cfg.stages.stats) {
    fs::path label_path = path;
    label_path.replace_extension(".txt");
    if (!fs::exists(label_path)) {
      throw Error(ErrorCode::kNoGroundTruth, "no label file " + label_path.filename().string());
    }
    gt = boxes_of(parse_labels(read_text(label_path)));
  }

  const MultiViewSet views =
      run_branches(raw, cfg.branches, derive_seed(SampleSeed{cfg.seed}, rec.frame_id), cfg.stages.ckps);
  rec.cropped = views.cropped.size();
  rec.pv1 = views.pv1.size();
  rec.pv2 = views.pv2.size();
  rec.pv3 = views.pv3.size();

  if (cfg.stages.sms) {
    const fs::path dir = out_dir / rec.frame_id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
    save_frame(dir / "pv1.bin", views.pv1);
    save_frame(dir / "pv2.bin", views.pv2);
    save_frame(dir / "pv3.bin", views.pv3);
    if (views.mask) {
      rec.keypoints = views.mask->triples.size();
      write_file_atomic(dir / "ckps.mask", write_mask(*views.mask));
      ojson side;
      side["frame_id"] = rec.frame_id;
      side["voxel_size"] = cfg.branches.ckps.voxel_size;
      side["tau_v"] = cfg.branches.ckps.tau_v;
      side["origin"] = cfg.branches.ckps.origin;
      side["keypoints"] = views.mask->triples.size();
      side["shared_voxels"] = views.mask->shared_voxel_count;
      write_text(dir / "ckps.json", side.dump(2) + "\n");
    }
  }

  if (gt) {
    const PointCloud* clouds[4] = {&views.cropped, &views.pv1, &views.pv2, &views.pv3};
    for (std::size_t o = 0; o < 4; ++o) {
      rec.tallies[o] = tally_regions(*clouds[o], *gt, cfg.branches.des, cfg.regions);
    }
    rec.rings_before = partition_rings(views.cropped, cfg.branches.des).counts;
    rec.rings_after = partition_rings(views.pv2, cfg.branches.des).counts;
  }
  return rec;
}

void write_stats(const fs::path& out_dir, const PipelineConfig& cfg,
                 const std::vector<const FrameRecord*>& frames) {
  std::array<std::array<double, 4>, 2> all{}, fg{};
  std::vector<std::size_t> before(cfg.branches.des.num_rings(), 0), after(before.size(), 0);
  for (const FrameRecord* f : frames) {
    for (std::size_t o = 0; o < 4; ++o) {
      for (std::size_t r = 0; r < 2; ++r) {
        all[r][o] += static_cast<double>(f->tallies[o][r].all);
        fg[r][o] += static_cast<double>(f->tallies[o][r].foreground);
      }
    }
    for (std::size_t j = 0; j < before.size(); ++j) {
      before[j] += f->rings_before[j];
      after[j] += f->rings_after[j];
    }
  }
  const double n = static_cast<double>(frames.size());
  for (auto* table : {&all, &fg}) {
    for (auto& region : *table) {
      for (double& v : region) v /= n;
    }
  }
  const RatioReport report = make_ratio_report(all, fg, frames.size());

  const fs::path dir = out_dir / "stats";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
  for (const auto& e : cfg.emit) {
    if (e == "csv") write_text(dir / "ratio_report.csv", emit_report(report, ReportFormat::kCsv));
    if (e == "json") write_text(dir / "ratio_report.json", emit_report(report, ReportFormat::kJson));
    if (e == "table") write_text(dir / "ratio_table.csv", emit_report(report, ReportFormat::kTable));
  }
  write_text(dir / "ring_shares.csv", emit_ring_shares_csv(ring_shares(before, after)));
}

}  // namespace

RunResult run_pipeline(const RunOptions& options) {
  RunResult result;
  auto fail = [&](ExitCode code, std::string record) {
    result.exit_code = code;
    result.error_record = std::move(record);
    return result;
  };

  // Configuration.
  PipelineConfig cfg;
  if (options.config_path) {
    std::string text;
    try {
      text = read_text(*options.config_path);
    } catch (const Error& e) {
      return fail(ExitCode::kIoError, error_record("io", to_string(e.code()), e.what()));
    }
    ConfigParse parsed = parse_config(text, options.preset);
    if (!parsed.ok()) {
      return fail(ExitCode::kConfigError,
                  error_record("config", "InvalidConfig",
                               std::to_string(parsed.violations.size()) + " config violation(s)", {},
                               parsed.violations));
    }
    cfg = std::move(parsed.config);
  } else {
    const std::string name = options.preset.value_or("kitti");
    auto preset = preset_config(name);
    if (!preset) {
      return fail(ExitCode::kConfigError,
                  error_record("config", "InvalidConfig", "unknown preset '" + name + "'"));
    }
    cfg = std::move(*preset);
  }
  if (options.output_dir) cfg.output_dir = *options.output_dir;
  if (options.stages) cfg.stages = *options.stages;
  if (options.seed) cfg.seed = *options.seed;
  if (options.workers) cfg.workers = *options.workers;
  if (options.emit_stats) cfg.stages.stats = true;
  if (const auto v = cfg.violations(); !v.empty()) {
    return fail(ExitCode::kConfigError,
                error_record("config", "InvalidConfig",
                             std::to_string(v.size()) + " config violation(s)", {}, v));
  }

  // Inputs.
  std::vector<fs::path> inputs;
  {
    std::error_code ec;
    if (!fs::is_directory(options.input_dir, ec)) {
      return fail(ExitCode::kIoError,
                  error_record("io", "IoError",
                               "input directory not found: " + options.input_dir.string()));
    }
    for (const auto& entry : fs::directory_iterator(options.input_dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".bin") inputs.push_back(entry.path());
    }
    if (ec) {
      return fail(ExitCode::kIoError,
                  error_record("io", "IoError", "cannot list " + options.input_dir.string()));
    }
  }
  if (inputs.empty()) {
    return fail(ExitCode::kIoError,
                error_record("io", "EmptyInput",
                             "no frames found in " + options.input_dir.string()));
  }
  std::sort(inputs.begin(), inputs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  const fs::path out_dir = cfg.output_dir;
  {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
      return fail(ExitCode::kIoError,
                  error_record("io", "IoError", "cannot create " + out_dir.string()));
    }
  }

  // Frames, claimed in index order so the first failure is well defined.
  std::vector<std::optional<FrameRecord>> records(inputs.size());
  std::vector<std::optional<FrameFailure>> failures(inputs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto work = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      try {
        records[i] = process_frame(inputs[i], cfg, out_dir);
      } catch (const Error& e) {
        failures[i] = FrameFailure{inputs[i].stem().string(), std::string(to_string(e.code())), e.what()};
      } catch (const std::exception& e) {
        failures[i] = FrameFailure{inputs[i].stem().string(), "InternalError", e.what()};
      }
      if (failures[i] && !options.keep_going) stop.store(true);
    }
  };
  {
    const std::size_t n_workers = std::min(cfg.workers, inputs.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
  }

  std::vector<const FrameRecord*> done;
  ojson skipped = ojson::array();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (failures[i]) {
      const FrameFailure& f = *failures[i];
      if (!options.keep_going) {
        return fail(ExitCode::kFrameError,
                    error_record(f.code == "IoError" ? "io" : "frame", f.code, f.message, f.frame_id));
      }
      std::fprintf(stderr, "%s\n", error_record("frame", f.code, f.message, f.frame_id).c_str());
      skipped.push_back({{"frame_id", f.frame_id}, {"code", f.code}, {"message", f.message}});
    } else if (records[i]) {
      done.push_back(&*records[i]);
    }
  }
  result.frames_written = done.size();
  result.frames_skipped = skipped.size();
  if (done.empty()) {
    return fail(ExitCode::kFrameError,
                error_record("frame", "EmptyInput", "every frame failed"));
  }

  try {
    if (cfg.stages.stats) write_stats(out_dir, cfg, done);

    ojson manifest;
    manifest["schema"] = "sms.manifest/1";
    manifest["tool_version"] = kVersion;
    manifest["rng"] = Rng::kAlgorithm;
    manifest["config_hash"] = config_hash(cfg);
    manifest["preset"] = cfg.preset;
    manifest["seed"] = cfg.seed;
    manifest["n_p"] = cfg.branches.n_p;
    manifest["stages"] = stages_json(cfg.stages);
    ojson frames = ojson::array();
    for (const FrameRecord* f : done) {
      ojson fr;
      fr["frame_id"] = f->frame_id;
      fr["counts"] = {{"raw", f->raw}, {"cropped", f->cropped}, {"pv1", f->pv1},
                      {"pv2", f->pv2}, {"pv3", f->pv3}};
      if (f->keypoints) fr["keypoints"] = *f->keypoints;
      frames.push_back(std::move(fr));
    }
    manifest["frames"] = std::move(frames);
    manifest["skipped"] = std::move(skipped);
    write_text(out_dir / "config.resolved.json", ojson::parse(canonical_config_json(cfg)).dump(2) + "\n");
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const Error& e) {
    return fail(ExitCode::kIoError, error_record("io", to_string(e.code()), e.what()));
  }
  return result;
}

}  // namespace sms

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

// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sms/analysis.hpp"
#include "sms/branches.hpp"
#include "sms/consistency.hpp"
#include "sms/fusion.hpp"
#include "sms/pipeline.hpp"
#include "sms/synthetic.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. Library results against brute force on random scenes.
void oracle_equivalence() {
  const auto t0 = Clock::now();
  const std::size_t scenes_n = 250;
  std::size_t mismatches = 0;
  std::size_t checks = 0;
  sms::Rng rng(sms::SampleSeed{2024});
  const auto des = sms::DesConfig::kitti();
  const auto gas = sms::GasConfig::kitti();

  for (std::size_t s = 0; s < scenes_n; ++s) {
    const sms::PointCloud cloud = scenes::random_cloud(rng, 1000);
    const std::vector<sms::Box7> gt = scenes::random_boxes(rng, 20);

    // DES ring assignment.
    const auto part = sms::partition_rings(cloud, des);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const std::uint32_t want = oracle::ring(oracle::planar(cloud.points[i]), des.tau_far, des.d_t);
      const std::uint32_t got = part.assignment[i] == sms::kOutsideRings ? 0 : part.assignment[i];
      mismatches += want != got;
      ++checks;
    }

    // GAS kept set.
    const auto kept = oracle::gas_kept(cloud, gas.x_s, gas.x_l, gas.y_s, gas.y_l, gas.x_t, gas.y_t,
                                       gas.tau_h, gas.passthrough_outside);
    std::vector<sms::Point> expect;
    for (std::size_t i : kept) expect.push_back(cloud.points[i]);
    mismatches += !sms::bit_identical(sms::gas_filter(cloud, gas).points, expect);
    ++checks;

    // CKPS keypoints.
    sms::CkpsConfig ck;
    ck.voxel_size = 0.1 + 0.9 * rng.uniform01();
    ck.tau_v = 0.01 + 0.05 * rng.uniform01();
    ck.origin = {scenes::uniform(rng, -1, 1), scenes::uniform(rng, -1, 1), scenes::uniform(rng, -3, 0)};
    const auto views = scenes::related_views(rng, 1 + rng.uniform_below(300), ck.tau_v);
    const auto mask = sms::select_keypoints(views[0], views[1], views[2], ck);
    const auto want_kp = oracle::keypoints(views[0], views[1], views[2], ck.origin, ck.voxel_size, ck.tau_v);
    mismatches += mask.triples != want_kp;
    ++checks;

    // Foreground sampling on the keypoint rows.
    std::array<std::vector<sms::Proposal>, 3> props;
    for (std::size_t v = 0; v < 3; ++v) props[v] = scenes::random_proposals(rng, views[v].size());
    std::vector<sms::Box7> fg_boxes;
    for (int b = 0; b < 4; ++b) {
      sms::Box7 box = scenes::random_box(rng, 6);
      box.l += 1;
      box.w += 1;
      box.h += 1;
      fg_boxes.push_back(box);
    }
    const auto cf = sms::foreground_sample_points(views, props, fg_boxes, mask);
    std::vector<std::size_t> want_rows;
    for (std::size_t r = 0; r < mask.triples.size(); ++r) {
      if (oracle::in_any(views[0].points[mask.triples[r][0]], fg_boxes)) want_rows.push_back(r);
    }
    mismatches += cf.source != want_rows;
    ++checks;
    // Also point containment against the scene's own boxes.
    for (const auto& p : cloud.points) {
      mismatches += sms::point_in_any_box(p, gt) != oracle::in_any(p, gt);
      ++checks;
    }

    // NMS.
    std::vector<sms::Proposal> nms_in;
    for (const auto& b : gt) {
      sms::Proposal p;
      p.box = b;
      p.logit = scenes::uniform(rng, -3, 3);
      nms_in.push_back(p);
      p.box.cx += scenes::uniform(rng, -0.5, 0.5);
      p.logit = scenes::uniform(rng, -3, 3);
      nms_in.push_back(p);
    }
    const double th = rng.uniform01() < 0.5 ? 0.7 : 0.5;
    mismatches += sms::nms_indices(nms_in, {th, 100}) != oracle::nms(nms_in, th, 100);
    ++checks;
  }
  const double secs = seconds_since(t0);
  report("oracle_equivalence", mismatches == 0 && secs < 60.0,
         std::to_string(scenes_n) + " scenes, " + std::to_string(checks) + " checks, " +
             std::to_string(mismatches) + " mismatches, " + fmt("%.1f s (limit 60 s)", secs));
}

// 2. Ring areas sum to the disc area.
void area_conservation() {
  sms::Rng rng(sms::SampleSeed{7});
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    sms::DesConfig c = sms::DesConfig::kitti();
    const std::uint32_t n_r = 1 + static_cast<std::uint32_t>(rng.uniform_below(20));
    c.d_t = 0.5 + 9.5 * rng.uniform01();
    c.tau_far = c.d_t * n_r;
    c.mu = 0.05 + 0.95 * rng.uniform01();
    double sum = 0;
    for (std::uint32_t j = 1; j <= n_r; ++j) sum += sms::ring_area(j, c);
    const double disc = c.mu * std::numbers::pi * c.tau_far * c.tau_far;
    worst = std::max(worst, std::abs(sum - disc) / disc);
  }
  report("ring_area_conservation", worst <= 1e-9, fmt("50 triples, max rel err %.3g (limit 1e-9)", worst));
}

// 3. View weighting and the identity case.
void consistency_weighting() {
  const double g3 = sms::consistency_total(0, 0, 3).gamma;
  const double g2 = sms::consistency_total(0, 0, 2).gamma;
  sms::Rng rng(sms::SampleSeed{9});
  sms::CfProposals cf;
  for (const auto& p : scenes::random_proposals(rng, 64)) {
    for (auto& v : cf.views) v.push_back(p);
    cf.source.push_back(cf.source.size());
  }
  const double l = sms::consistency_total(sms::consistency_cls_loss(cf), sms::consistency_box_loss(cf), 3).l_cons;
  report("consistency_weighting", g3 == 0.5 && g2 == 1.0 && l == 0.0,
         fmt("gamma(3)=%g gamma(2)=%g l_cons(identical)=%g", g3, g2, l));
}

std::vector<sms::AnalysisFrame> corpus(std::size_t n) {
  std::vector<sms::AnalysisFrame> frames;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%06zu", i);
    auto f = sms::make_scene({}, sms::derive_seed(sms::SampleSeed{0}, id));
    f.cloud.frame_id = id;
    frames.push_back({std::move(f.cloud), sms::boxes_of(f.labels)});
  }
  return frames;
}

// 4 and 5. Foreground ratios and ring shares on a synthetic corpus.
void ratios_and_ring_shares() {
  const auto t0 = Clock::now();
  const auto frames = corpus(50);
  const auto cfg = sms::BranchConfig::kitti();
  const sms::RegionSplit split;
  const auto rep = sms::ratio_report(frames, cfg, split, sms::SampleSeed{0});
  const double secs = seconds_since(t0);
  using sms::Region;
  using sms::SamplingOp;
  auto r2 = [&](Region r, SamplingOp o) { return rep.at(r, o).r2.value_or(NAN); };
  auto r1 = [&](Region r, SamplingOp o) { return rep.at(r, o).r1.value_or(NAN); };
  const double hd = 100 * (r2(Region::kHighDensity, SamplingOp::kGas) - r2(Region::kHighDensity, SamplingOp::kNone));
  const double ld = 100 * (r2(Region::kLowDensity, SamplingOp::kGas) - r2(Region::kLowDensity, SamplingOp::kNone));
  report("fg_share_gain_gas", hd >= 8 && ld >= 8 && secs < 120,
         fmt("R2 gain HD %+.1f pp, LD %+.1f pp (limit >= 8 pp), %.1f s", hd, ld, secs));
  const double des_ld = r1(Region::kLowDensity, SamplingOp::kDes);
  const double rnd_ld = r1(Region::kLowDensity, SamplingOp::kRandom);
  report("fg_retention_des_ld", des_ld > rnd_ld, fmt("R1 LD: DES %.3f vs random %.3f", des_ld, rnd_ld));

  // Summed over frames: share of each ring before (cropped) and after DES (pv2).
  std::vector<std::size_t> before(cfg.des.num_rings(), 0), after(before.size(), 0);
  for (const auto& f : frames) {
    const auto views = sms::run_branches(f.raw, cfg, sms::derive_seed(sms::SampleSeed{0}, f.raw.frame_id), false);
    const auto b = sms::partition_rings(views.cropped, cfg.des).counts;
    const auto a = sms::partition_rings(views.pv2, cfg.des).counts;
    for (std::size_t j = 0; j < before.size(); ++j) {
      before[j] += b[j];
      after[j] += a[j];
    }
  }
  const auto shares = sms::ring_shares(before, after);
  double near_b = 0, near_a = 0, far_b = 0, far_a = 0;
  for (const auto& s : shares) {
    (s.ring <= 3 ? near_b : far_b) += s.before_pct;
    (s.ring <= 3 ? near_a : far_a) += s.after_pct;
  }
  report("ring_share_shift", near_a < near_b && far_a > far_b,
         fmt("rings 1-3 %.1f%% -> %.1f%%, rings 4-8 %.1f%% -> %.1f%%", near_b, near_a, far_b, far_a));
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

// 6. Byte-identical reruns, independent of the worker count.
void determinism() {
  const fs::path root = fs::temp_directory_path() / "sms_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root / "in");
  for (const auto& f : corpus(6)) {
    sms::save_frame(root / "in" / (f.raw.frame_id + ".bin"), f.raw);
    std::vector<sms::LabeledBox> labels;
    for (const auto& b : *f.gt) labels.push_back({"Car", b, 1.0});
    std::ofstream(root / "in" / (f.raw.frame_id + ".txt")) << sms::format_labels(labels);
  }
  std::vector<std::map<std::string, std::string>> runs;
  bool all_ok = true;
  const std::size_t workers[] = {1, 1, 1, 4};
  for (std::size_t k = 0; k < 4; ++k) {
    sms::RunOptions o;
    o.input_dir = root / "in";
    o.output_dir = root / ("out" + std::to_string(k));
    o.emit_stats = true;
    o.workers = workers[k];
    all_ok = all_ok && sms::run_pipeline(o).exit_code == sms::ExitCode::kOk;
    runs.push_back(tree(*o.output_dir));
  }
  bool same = all_ok;
  for (const auto& r : runs) same = same && r == runs[0];
  report("determinism", same,
         std::to_string(runs[0].size()) + " files, 3 runs with 1 worker + 1 run with 4 workers");
  fs::remove_all(root);
}

// 7. Analytic derivatives against central differences.
void gradients() {
  const double h = 1e-5;
  double worst = 0;
  for (double d : {0.01, 0.1, 0.5, 0.9}) {
    const double fs_ = (sms::smooth_l1(d + h) - sms::smooth_l1(d - h)) / (2 * h);
    const double ff = (sms::focal_consistency(d + h) - sms::focal_consistency(d - h)) / (2 * h);
    worst = std::max(worst, std::abs(sms::smooth_l1_grad(d) - fs_) / std::abs(fs_));
    worst = std::max(worst, std::abs(sms::focal_consistency_grad(d) - ff) / std::abs(ff));
  }
  report("gradient_check", worst <= 1e-5, fmt("max rel err %.3g (limit 1e-5)", worst));
}

// 8. One dense frame through all three branches plus keypoints.
void throughput() {
  sms::SceneParams p;
  p.density_scale = 10000;
  auto probe = sms::make_scene(p, sms::SampleSeed{11});
  p.density_scale *= 120000.0 / static_cast<double>(probe.cloud.size());
  const auto frame = sms::make_scene(p, sms::SampleSeed{11});
  const auto cfg = sms::BranchConfig::kitti();
  std::vector<double> ms;
  for (int rep = 0; rep < 7; ++rep) {
    const auto t0 = Clock::now();
    const auto views = sms::run_branches(frame.cloud, cfg, sms::SampleSeed{rep + 1u}, true);
    ms.push_back(1000 * seconds_since(t0));
    if (views.pv1.size() != cfg.n_p) ms.back() = INFINITY;
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];
  report("throughput_120k", median < 150.0 && frame.cloud.size() >= 115000,
         fmt("%.0f points, median %.1f ms (limit 150 ms)", static_cast<double>(frame.cloud.size()), median));
}

}  // namespace

int main() {
  oracle_equivalence();
  area_conservation();
  consistency_weighting();
  ratios_and_ring_shares();
  determinism();
  gradients();
  throughput();
  std::printf("%s\n", failures == 0 ? "all acceptance criteria passed"
                                      : (std::to_string(failures) + " criterion(s) failed").c_str());
  return failures == 0 ? 0 : 1;
}

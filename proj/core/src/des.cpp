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

#include "sms/des.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sms/error.hpp"

namespace sms {
namespace {

bool is_positive_integer_ratio(double num, double den, double* ratio) {
  if (!(num > 0) || !(den > 0)) return false;
  const double q = num / den;
  const double r = std::round(q);
  if (ratio) *ratio = r;
  return r >= 1 && std::abs(q - r) <= 1e-9 * std::max(1.0, r);
}

// floor(s * n) guarded against products like 0.1 * 30 landing a hair
// below an integer.
std::size_t change_count(double s, std::size_t n) {
  return static_cast<std::size_t>(std::floor(s * static_cast<double>(n) + 1e-9));
}

}  // namespace

DesConfig DesConfig::kitti() { return DesConfig{}; }

DesConfig DesConfig::wod() {
  DesConfig c;
  c.tau_far = 55.0;
  c.mu = 1.0;
  c.rho_s = 12.0;
  c.rho_m = 20.0;
  c.rho_l = 36.0;
  c.tau_z_min = -1.0;
  c.tau_z_max = 2.0;
  return c;
}

std::vector<std::string> DesConfig::violations() const {
  std::vector<std::string> v;
  if (!(tau_far > 0)) v.push_back("des.tau_far must be > 0");
  if (!(d_t > 0)) v.push_back("des.d_t must be > 0");
  if (tau_far > 0 && d_t > 0 && !is_positive_integer_ratio(tau_far, d_t, nullptr)) {
    v.push_back("des: n_r = tau_far / d_t must be a positive integer (ring count)");
  }
  if (!(mu > 0)) v.push_back("des.mu must be > 0");
  if (!(rho_s > 0 && rho_s <= rho_m && rho_m <= rho_l)) {
    v.push_back("des: 0 < rho_s <= rho_m <= rho_l required");
  }
  if (!(s1 == s3 && s3 > s2 && s2 > 0)) {
    v.push_back("des: s1 = s3 > s2 > 0 required");
  }
  if (!(s3 < 1)) v.push_back("des: downsampling proportions must be < 1");
  if (!(tau_z_min < tau_z_max)) v.push_back("des: tau_z_min < tau_z_max required");
  if (!(jitter >= 0)) v.push_back("des.jitter must be >= 0");
  return v;
}

void DesConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorCode::kInvalidConfig, msg);
}

std::size_t DesConfig::num_rings() const {
  double r = 0;
  if (!is_positive_integer_ratio(tau_far, d_t, &r)) {
    throw Error(ErrorCode::kInvalidConfig, "tau_far / d_t is not a positive integer");
  }
  return static_cast<std::size_t>(r);
}

std::string_view to_string(DesBranch branch) {
  switch (branch) {
    case DesBranch::kUpsample: return "upsample";
    case DesBranch::kKeep: return "keep";
    case DesBranch::kDownsampleMedium: return "downsample_medium";
    case DesBranch::kDownsampleHigh: return "downsample_high";
  }
  return "?";
}

DesBranch classify_density(double rho, const DesConfig& cfg) noexcept {
  if (rho < cfg.rho_s) return DesBranch::kUpsample;
  if (rho < cfg.rho_m) return DesBranch::kKeep;
  if (rho < cfg.rho_l) return DesBranch::kDownsampleMedium;
  return DesBranch::kDownsampleHigh;
}

double planar_distance(const Point& p) noexcept {
  const double x = p.x, y = p.y;
  return std::sqrt(x * x + y * y);
}

std::uint32_t ring_index(double d, const DesConfig& cfg) noexcept {
  if (d > cfg.tau_far) return kOutsideRings;
  const auto n_r = static_cast<std::uint32_t>(std::round(cfg.tau_far / cfg.d_t));
  if (d <= 0) return 1;
  auto j = static_cast<std::uint32_t>(std::max(1.0, std::ceil(d / cfg.d_t)));
  // ceil(d / d_t) can be off by one next to a boundary; settle against the
  // annulus bounds themselves.
  while (j > 1 && d <= (j - 1) * cfg.d_t) --j;
  while (d > j * cfg.d_t && j < n_r) ++j;
  return std::min(j, n_r);
}

double ring_area(std::uint32_t ring, const DesConfig& cfg) noexcept {
  const double j = ring;
  return cfg.mu * std::numbers::pi * (j * j - (j - 1) * (j - 1)) * cfg.d_t * cfg.d_t;
}

RingPartition partition_rings(const PointCloud& cloud, const DesConfig& cfg) {
  cfg.validate();
  const std::size_t n_r = cfg.num_rings();
  RingPartition part;
  part.assignment.resize(cloud.size());
  part.counts.assign(n_r, 0);
  part.areas.resize(n_r);
  part.densities.resize(n_r);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::uint32_t j = ring_index(planar_distance(cloud.points[i]), cfg);
    part.assignment[i] = j;
    if (j == kOutsideRings) {
      ++part.outside;
    } else {
      ++part.counts[j - 1];
    }
  }
  for (std::size_t j = 0; j < n_r; ++j) {
    part.areas[j] = ring_area(static_cast<std::uint32_t>(j + 1), cfg);
    part.densities[j] = static_cast<double>(part.counts[j]) / part.areas[j];
  }
  return part;
}

DesResult des_sample_detailed(const PointCloud& cloud, const DesConfig& cfg,
                              SampleSeed seed) {
  const RingPartition part = partition_rings(cloud, cfg);
  const std::size_t n_r = part.num_rings();

  std::vector<std::vector<std::uint32_t>> members(n_r);
  for (std::size_t j = 0; j < n_r; ++j) members[j].reserve(part.counts[j]);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (part.assignment[i] != kOutsideRings) {
      members[part.assignment[i] - 1].push_back(static_cast<std::uint32_t>(i));
    }
  }

  const Rng base(seed);
  std::vector<char> removed(cloud.size(), 0);
  std::vector<Point> added;
  DesResult result;
  result.rings.reserve(n_r);

  for (std::size_t j = 0; j < n_r; ++j) {
    RingChange change;
    change.ring = static_cast<std::uint32_t>(j + 1);
    change.before = part.counts[j];
    change.branch = classify_density(part.densities[j], cfg);
    Rng rng = base.split(change.ring);
    auto& ring = members[j];

    switch (change.branch) {
      case DesBranch::kUpsample: {
        std::vector<std::uint32_t> pool;
        for (std::uint32_t i : ring) {
          const double z = cloud.points[i].z;
          if (z >= cfg.tau_z_min && z <= cfg.tau_z_max) pool.push_back(i);
        }
        change.candidates = pool.size();
        if (pool.empty()) break;
        const std::size_t k = change_count(cfg.s1, ring.size());
        for (std::size_t t = 0; t < k; ++t) {
          Point p = cloud.points[pool[rng.uniform_below(pool.size())]];
          if (cfg.jitter > 0) {
            p.x += static_cast<float>((2 * rng.uniform01() - 1) * cfg.jitter);
            p.y += static_cast<float>((2 * rng.uniform01() - 1) * cfg.jitter);
            p.z += static_cast<float>((2 * rng.uniform01() - 1) * cfg.jitter);
          }
          added.push_back(p);
        }
        change.added = k;
        break;
      }
      case DesBranch::kKeep:
        break;
      case DesBranch::kDownsampleMedium:
      case DesBranch::kDownsampleHigh: {
        const double s = change.branch == DesBranch::kDownsampleMedium ? cfg.s2 : cfg.s3;
        const std::size_t k = std::min(change_count(s, ring.size()), ring.size());
        for (std::size_t t = 0; t < k; ++t) {
          const std::size_t u = t + rng.uniform_below(ring.size() - t);
          std::swap(ring[t], ring[u]);
          removed[ring[t]] = 1;
        }
        change.removed = k;
        break;
      }
    }
    result.rings.push_back(change);
  }

  PointCloud& out = result.cloud;
  out.frame_id = cloud.frame_id;
  out.crop_applied = cloud.crop_applied;
  out.points.reserve(cloud.size() + added.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!removed[i]) out.points.push_back(cloud.points[i]);
  }
  out.points.insert(out.points.end(), added.begin(), added.end());
  return result;
}

PointCloud des_sample(const PointCloud& cloud, const DesConfig& cfg, SampleSeed seed) {
  return des_sample_detailed(cloud, cfg, seed).cloud;
}

PointCloud finalize_branch(const PointCloud& cloud, std::size_t n_p, SampleSeed seed) {
  return random_fixed_count(cloud, n_p, seed);
}

}  // namespace sms

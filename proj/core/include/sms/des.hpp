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
#include <string>
#include <vector>

#include "sms/point_cloud.hpp"
#include "sms/rng.hpp"

namespace sms {

/// Density Equalization Sampling parameters.
///
/// The planar range [0, tau_far] is split into rings of width d_t. Ring j
/// (1-based) covers (j-1)*d_t < d <= j*d_t, with d = 0 in ring 1, and has
/// area mu * pi * (j^2 - (j-1)^2) * d_t^2. The sampling proportions are
/// change-fractions: s1 of a sparse ring's points is added, s2 / s3 of a
/// medium / dense ring's points is removed.
struct DesConfig {
  double tau_far = 40.0;
  double d_t = 5.0;
  double mu = 0.5;
  double rho_s = 5.0;
  double rho_m = 8.0;
  double rho_l = 15.0;
  double s1 = 0.15;
  double s2 = 0.10;
  double s3 = 0.15;
  double tau_z_min = -1.5;
  double tau_z_max = 0.5;
  /// Half-width (meters) of uniform xyz jitter on upsampled duplicates.
  /// Zero keeps duplicates exact.
  double jitter = 0.0;

  static DesConfig kitti();
  static DesConfig wod();

  /// All violated invariants, empty when valid.
  std::vector<std::string> violations() const;
  /// Throws InvalidConfig listing every violation.
  void validate() const;

  std::size_t num_rings() const;
};

enum class DesBranch { kUpsample, kKeep, kDownsampleMedium, kDownsampleHigh };

std::string_view to_string(DesBranch branch);

/// Branch of the density rule for a ring density.
DesBranch classify_density(double rho, const DesConfig& cfg) noexcept;

inline constexpr std::uint32_t kOutsideRings = 0;

/// 1-based ring index for planar distance `d`, or kOutsideRings when
/// d > tau_far.
std::uint32_t ring_index(double d, const DesConfig& cfg) noexcept;

double planar_distance(const Point& p) noexcept;

/// Closed-form ring area, `ring` 1-based.
double ring_area(std::uint32_t ring, const DesConfig& cfg) noexcept;

struct RingPartition {
  /// Per-point ring index, kOutsideRings for d > tau_far.
  std::vector<std::uint32_t> assignment;
  /// Indexed by ring - 1.
  std::vector<std::size_t> counts;
  std::vector<double> areas;
  std::vector<double> densities;
  std::size_t outside = 0;

  std::size_t num_rings() const noexcept { return counts.size(); }
};

RingPartition partition_rings(const PointCloud& cloud, const DesConfig& cfg);

/// Per-ring outcome, for reporting and tests.
struct RingChange {
  std::uint32_t ring = 0;
  DesBranch branch = DesBranch::kKeep;
  std::size_t before = 0;
  std::size_t added = 0;
  std::size_t removed = 0;
  /// Upsampling candidates (in-ring points inside the z-focus band).
  std::size_t candidates = 0;
};

struct DesResult {
  PointCloud cloud;
  std::vector<RingChange> rings;
};

/// Applies the density rule per ring. Output holds the surviving input
/// points in input order, then the upsampled duplicates grouped by ring.
/// Points beyond tau_far pass through. Every ring draws from its own
/// sub-stream of `seed`.
DesResult des_sample_detailed(const PointCloud& cloud, const DesConfig& cfg,
                              SampleSeed seed);
PointCloud des_sample(const PointCloud& cloud, const DesConfig& cfg, SampleSeed seed);

/// Normalizes a branch output to the fixed budget `n_p`.
PointCloud finalize_branch(const PointCloud& cloud, std::size_t n_p, SampleSeed seed);

}  // namespace sms

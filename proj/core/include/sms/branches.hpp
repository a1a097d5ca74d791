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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sms/ckps.hpp"
#include "sms/des.hpp"
#include "sms/gas.hpp"
#include "sms/point_cloud.hpp"
#include "sms/rng.hpp"

namespace sms {

/// Everything needed to turn one raw frame into the three sampled views.
struct BranchConfig {
  CropRange crop{0.0, 70.4, -40.0, 40.0, -3.0, 1.0};
  DesConfig des{};
  GasConfig gas{};
  CkpsConfig ckps{};
  std::size_t n_p = 16384;

  static BranchConfig kitti();
  static BranchConfig wod();

  std::vector<std::string> violations() const;
};

/// Random (Pv1), density-equalized (Pv2) and ground-free (Pv3) views of one
/// frame, plus the cropped source they were drawn from.
struct MultiViewSet {
  PointCloud cropped;
  PointCloud pv1;
  PointCloud pv2;
  PointCloud pv3;
  std::optional<KeypointMask> mask;
};

/// Child seed for a named purpose (frame id, branch name).
SampleSeed derive_seed(SampleSeed parent, std::string_view label) noexcept;

/// crop -> {random, DES, GAS} -> fixed count n_p, each branch on its own
/// seed derived from `frame_seed`. CKPS runs when `with_keypoints`.
MultiViewSet run_branches(const PointCloud& raw, const BranchConfig& cfg,
                          SampleSeed frame_seed, bool with_keypoints);

}  // namespace sms

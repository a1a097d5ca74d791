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

#include "sms/branches.hpp"

#include "sms/error.hpp"

namespace sms {

BranchConfig BranchConfig::kitti() {
  BranchConfig c;
  c.crop = {0.0, 70.4, -40.0, 40.0, -3.0, 1.0};
  c.des = DesConfig::kitti();
  c.gas = GasConfig::kitti();
  c.ckps.origin = {c.crop.x_min, c.crop.y_min, c.crop.z_min};
  c.n_p = 16384;
  return c;
}

BranchConfig BranchConfig::wod() {
  BranchConfig c;
  c.crop = {-75.2, 75.2, -75.2, 75.2, -2.0, 4.0};
  c.des = DesConfig::wod();
  c.gas = GasConfig::wod();
  c.ckps.origin = {c.crop.x_min, c.crop.y_min, c.crop.z_min};
  c.n_p = 180000;
  return c;
}

std::vector<std::string> BranchConfig::violations() const {
  std::vector<std::string> v;
  if (!crop.valid()) v.push_back("crop: min < max required on every axis");
  if (n_p == 0) v.push_back("n_p must be > 0");
  for (auto&& list : {des.violations(), gas.violations(), ckps.violations()}) {
    v.insert(v.end(), list.begin(), list.end());
  }
  return v;
}

SampleSeed derive_seed(SampleSeed parent, std::string_view label) noexcept {
  return SampleSeed{mix64(parent.value ^ mix64(fnv1a64(label)))};
}

MultiViewSet run_branches(const PointCloud& raw, const BranchConfig& cfg,
                          SampleSeed frame_seed, bool with_keypoints) {
  MultiViewSet set;
  set.cropped = crop(raw, cfg.crop);
  if (set.cropped.empty()) {
    throw Error(ErrorCode::kEmptyInput, "frame '" + raw.frame_id + "' is empty after cropping");
  }
  set.pv1 = random_fixed_count(set.cropped, cfg.n_p, derive_seed(frame_seed, "pv1"));

  const PointCloud des = des_sample(set.cropped, cfg.des, derive_seed(frame_seed, "des"));
  set.pv2 = finalize_branch(des, cfg.n_p, derive_seed(frame_seed, "pv2"));

  const PointCloud gas = gas_filter(set.cropped, cfg.gas);
  if (gas.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "frame '" + raw.frame_id + "' has no points left after ground removal");
  }
  set.pv3 = finalize_branch(gas, cfg.n_p, derive_seed(frame_seed, "pv3"));

  if (with_keypoints) set.mask = select_keypoints(set.pv1, set.pv2, set.pv3, cfg.ckps);
  return set;
}

}  // namespace sms

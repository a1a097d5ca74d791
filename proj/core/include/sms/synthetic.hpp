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
#include <vector>

#include "sms/geometry.hpp"
#include "sms/point_cloud.hpp"
#include "sms/rng.hpp"

namespace sms {

/// Parameters of a procedural LiDAR-like frame: a flat ground plane in the
/// forward half-plane whose areal density falls off as density_scale / d^2,
/// plus upright boxes standing on it whose point count falls off as
/// box_point_scale / d^2. Ground points under a box footprint are occluded.
struct SceneParams {
  double ground_z = -1.7;
  double ground_noise = 0.02;
  double density_scale = 2000.0;
  double d_min = 2.0;
  double d_max = 70.0;
  std::size_t min_boxes = 5;
  std::size_t max_boxes = 15;
  double box_d_min = 5.0;
  double box_d_max = 38.0;
  double box_point_scale = 60000.0;
  std::size_t box_points_min = 8;
  std::size_t box_points_max = 1500;
};

struct SyntheticFrame {
  PointCloud cloud;
  std::vector<LabeledBox> labels;
};

SyntheticFrame make_scene(const SceneParams& params, SampleSeed seed);

}  // namespace sms

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

#include "sms/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sms {

SyntheticFrame make_scene(const SceneParams& params, SampleSeed seed) {
  constexpr double kPi = std::numbers::pi;
  SyntheticFrame frame;
  Rng box_rng = Rng(seed).split(1);
  Rng ground_rng = Rng(seed).split(2);
  Rng fill_rng = Rng(seed).split(3);

  auto uniform = [](Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); };

  const std::size_t span = params.max_boxes - params.min_boxes + 1;
  const std::size_t n_boxes = params.min_boxes + box_rng.uniform_below(span);
  std::vector<Box7> boxes;
  for (std::size_t attempt = 0; boxes.size() < n_boxes && attempt < 200 * n_boxes; ++attempt) {
    const bool pedestrian = box_rng.uniform01() < 0.25;
    Box7 b;
    b.l = pedestrian ? uniform(box_rng, 0.6, 1.0) : uniform(box_rng, 3.5, 4.6);
    b.w = pedestrian ? uniform(box_rng, 0.5, 0.8) : uniform(box_rng, 1.5, 1.9);
    b.h = pedestrian ? uniform(box_rng, 1.5, 1.9) : uniform(box_rng, 1.4, 1.7);
    const double d = uniform(box_rng, params.box_d_min, params.box_d_max);
    const double theta = uniform(box_rng, -0.4 * kPi, 0.4 * kPi);
    b.cx = d * std::cos(theta);
    b.cy = d * std::sin(theta);
    b.cz = params.ground_z + b.h / 2;
    b.yaw = uniform(box_rng, -kPi, kPi);
    const bool overlaps = std::any_of(boxes.begin(), boxes.end(), [&](const Box7& o) {
      return bev_intersection_area(o.enlarged(0.5), b.enlarged(0.5)) > 0;
    });
    if (overlaps) continue;
    boxes.push_back(b);
    frame.labels.push_back({pedestrian ? "Pedestrian" : "Car", b, 1.0});
  }

  // Ground: planar distance is log-uniform, which gives areal density ~ 1/d^2.
  const double log_span = std::log(params.d_max / params.d_min);
  const auto n_ground =
      static_cast<std::size_t>(std::llround(params.density_scale * kPi * log_span));
  frame.cloud.points.reserve(n_ground + boxes.size() * 400);
  for (std::size_t i = 0; i < n_ground; ++i) {
    const double d = params.d_min * std::exp(log_span * ground_rng.uniform01());
    const double theta = uniform(ground_rng, -kPi / 2, kPi / 2);
    const double x = d * std::cos(theta);
    const double y = d * std::sin(theta);
    const double z = params.ground_z + uniform(ground_rng, -params.ground_noise, params.ground_noise);
    const double r = ground_rng.uniform01() * 0.3;
    const bool occluded = std::any_of(boxes.begin(), boxes.end(),
                                      [&](const Box7& b) { return bev_contains(b, x, y); });
    if (occluded) continue;
    frame.cloud.points.push_back(
        {static_cast<float>(x), static_cast<float>(y), static_cast<float>(z), static_cast<float>(r)});
  }

  for (const Box7& b : boxes) {
    const double d = std::hypot(b.cx, b.cy);
    const auto n = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(params.box_point_scale / (d * d))),
        params.box_points_min, params.box_points_max);
    const double c = std::cos(b.yaw), s = std::sin(b.yaw);
    for (std::size_t k = 0; k < n; ++k) {
      // Stay a hair inside the box so float rounding keeps labels exact.
      const double lx = uniform(fill_rng, -0.49, 0.49) * b.l;
      const double ly = uniform(fill_rng, -0.49, 0.49) * b.w;
      const double lz = uniform(fill_rng, -0.49, 0.49) * b.h;
      frame.cloud.points.push_back({static_cast<float>(b.cx + c * lx - s * ly),
                                    static_cast<float>(b.cy + s * lx + c * ly),
                                    static_cast<float>(b.cz + lz),
                                    static_cast<float>(0.3 + 0.7 * fill_rng.uniform01())});
    }
  }
  return frame;
}

}  // namespace sms

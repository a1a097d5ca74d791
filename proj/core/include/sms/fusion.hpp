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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sms/consistency.hpp"
#include "sms/point_cloud.hpp"

namespace sms {

struct NmsConfig {
  double iou_threshold = 0.7;
  std::size_t max_keep = 100;

  /// 0.7 for cars, 0.5 for every other class.
  static NmsConfig for_class(bool is_car) { return {is_car ? 0.7 : 0.5, 100}; }
};

/// Greedy rotated-BEV NMS. Proposals are visited by descending score, ties
/// broken by lower input index; a proposal is suppressed when its BEV IoU
/// with an already kept one exceeds the threshold. Returns kept input
/// indices in visiting order.
std::vector<std::size_t> nms_indices(std::span<const Proposal> proposals,
                                     const NmsConfig& cfg);
std::vector<Proposal> nms(std::span<const Proposal> proposals, const NmsConfig& cfg);

/// Row-major per-point feature rows.
struct FeatureTable {
  std::size_t dim = 0;
  std::vector<float> values;

  std::size_t rows() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> row(std::size_t i) const noexcept {
    return std::span<const float>(values).subspan(i * dim, dim);
  }
};

struct MvfpConfig {
  NmsConfig per_view{};
  NmsConfig joint{};
  /// Enlarges every RoI by this much on each side before gathering.
  double roi_margin = 0.0;
};

struct RoiPool {
  Proposal roi;
  /// View (0..2) whose proposal became this RoI.
  std::size_t source_view = 0;
  /// Indices into the concatenated cloud, ascending.
  std::vector<std::uint32_t> point_indices;
  FeatureTable features;
};

struct MvfpResult {
  /// Views 1..3 concatenated in order.
  PointCloud points;
  FeatureTable features;
  /// points of view v live in [view_offsets[v], view_offsets[v + 1]).
  std::array<std::size_t, 4> view_offsets{};
  std::vector<RoiPool> rois;
};

/// Multi-view fusion pooling: concatenates the three views' points and
/// features, runs NMS on each view's proposals, concatenates the survivors
/// and runs NMS again across views, then gathers the points and feature rows
/// inside every resulting RoI. Throws AlignmentError when a feature table
/// does not match its cloud or feature widths disagree.
MvfpResult mvfp_pool(std::span<const PointCloud, 3> clouds,
                     std::span<const FeatureTable, 3> features,
                     std::span<const std::vector<Proposal>, 3> proposals,
                     const MvfpConfig& cfg);

}  // namespace sms

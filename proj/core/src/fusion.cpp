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

#include "sms/fusion.hpp"

#include <algorithm>
#include <numeric>

#include "sms/error.hpp"

namespace sms {

std::vector<std::size_t> nms_indices(std::span<const Proposal> proposals,
                                     const NmsConfig& cfg) {
  if (!(cfg.iou_threshold > 0 && cfg.iou_threshold <= 1)) {
    throw Error(ErrorCode::kInvalidConfig, "NMS IoU threshold must be in (0, 1]");
  }
  std::vector<std::size_t> order(proposals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Sigmoid is monotone, so ordering by logit equals ordering by score.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return proposals[a].logit > proposals[b].logit;
  });

  std::vector<std::size_t> keep;
  for (std::size_t idx : order) {
    if (keep.size() >= cfg.max_keep) break;
    const Box7& box = proposals[idx].box;
    const bool suppressed = std::any_of(keep.begin(), keep.end(), [&](std::size_t k) {
      return bev_iou(proposals[k].box, box) > cfg.iou_threshold;
    });
    if (!suppressed) keep.push_back(idx);
  }
  return keep;
}

std::vector<Proposal> nms(std::span<const Proposal> proposals, const NmsConfig& cfg) {
  std::vector<Proposal> out;
  for (std::size_t i : nms_indices(proposals, cfg)) out.push_back(proposals[i]);
  return out;
}

MvfpResult mvfp_pool(std::span<const PointCloud, 3> clouds,
                     std::span<const FeatureTable, 3> features,
                     std::span<const std::vector<Proposal>, 3> proposals,
                     const MvfpConfig& cfg) {
  std::size_t dim = 0;
  bool dim_set = false;
  for (std::size_t v = 0; v < 3; ++v) {
    const FeatureTable& f = features[v];
    if (clouds[v].empty() && f.values.empty()) continue;
    if (f.dim == 0 || f.values.size() % f.dim != 0 || f.rows() != clouds[v].size()) {
      throw Error(ErrorCode::kAlignmentError,
                  "view " + std::to_string(v + 1) + " features do not align with its " +
                      std::to_string(clouds[v].size()) + " points");
    }
    if (dim_set && f.dim != dim) {
      throw Error(ErrorCode::kAlignmentError, "feature widths differ across views");
    }
    dim = f.dim;
    dim_set = true;
  }

  MvfpResult out;
  out.features.dim = dim;
  for (std::size_t v = 0; v < 3; ++v) {
    out.view_offsets[v] = out.points.size();
    out.points.points.insert(out.points.points.end(), clouds[v].points.begin(),
                             clouds[v].points.end());
    out.features.values.insert(out.features.values.end(), features[v].values.begin(),
                               features[v].values.end());
  }
  out.view_offsets[3] = out.points.size();
  out.points.frame_id = clouds[0].frame_id;

  std::vector<Proposal> survivors;
  std::vector<std::size_t> survivor_view;
  for (std::size_t v = 0; v < 3; ++v) {
    for (std::size_t i : nms_indices(proposals[v], cfg.per_view)) {
      survivors.push_back(proposals[v][i]);
      survivor_view.push_back(v);
    }
  }

  for (std::size_t i : nms_indices(survivors, cfg.joint)) {
    RoiPool pool;
    pool.roi = survivors[i];
    pool.source_view = survivor_view[i];
    pool.features.dim = dim;
    const Box7 region = survivors[i].box.enlarged(cfg.roi_margin);
    for (std::size_t p = 0; p < out.points.size(); ++p) {
      if (!point_in_box(out.points.points[p], region)) continue;
      pool.point_indices.push_back(static_cast<std::uint32_t>(p));
      const auto row = out.features.row(p);
      pool.features.values.insert(pool.features.values.end(), row.begin(), row.end());
    }
    out.rois.push_back(std::move(pool));
  }
  return out;
}

}  // namespace sms

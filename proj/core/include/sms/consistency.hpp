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
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sms/ckps.hpp"
#include "sms/geometry.hpp"
#include "sms/point_cloud.hpp"

namespace sms {

inline double sigmoid(double x) noexcept {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// A first-stage prediction: box, raw (pre-sigmoid) class logit, class id.
struct Proposal {
  Box7 box;
  double logit = 0.0;
  int class_id = 0;

  double score() const noexcept { return sigmoid(logit); }

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// Consistent-foreground proposals of the three views, aligned row by row:
/// views[i][j] is view i's proposal for the j-th foreground keypoint / cell.
struct CfProposals {
  std::array<std::vector<Proposal>, 3> views;
  /// Row provenance: keypoint row in the mask (point mode) or flat cell id
  /// (BEV mode).
  std::vector<std::size_t> source;

  std::size_t size() const noexcept { return views[0].size(); }
};

/// Point-based foreground sampling. Keeps the mask rows whose view-1 point
/// lies inside at least one GT box, and gathers each view's proposal at its
/// keypoint index. Throws LengthMismatch when a proposal list is not aligned
/// with its cloud or the mask points outside a cloud.
CfProposals foreground_sample_points(std::span<const PointCloud, 3> clouds,
                                     std::span<const std::vector<Proposal>, 3> proposals,
                                     const std::vector<Box7>& gt, const KeypointMask& mask);

/// Geometry of a BEV proposal grid. Cell (ix, iy) has flat id iy * nx + ix
/// and center (x_min + (ix + 0.5) * cell_size, y_min + (iy + 0.5) * cell_size).
struct BevGrid {
  double x_min = 0.0;
  double y_min = 0.0;
  double cell_size = 1.0;
  std::size_t nx = 0;
  std::size_t ny = 0;

  std::size_t cell_count() const noexcept { return nx * ny; }
  Vec2 center(std::size_t flat) const noexcept;

  friend bool operator==(const BevGrid&, const BevGrid&) = default;
};

struct BevProposalGrid {
  BevGrid grid;
  std::vector<Proposal> cells;
};

/// Grid-based foreground sampling: keeps the cells whose center lies in the
/// BEV footprint of at least one GT box. Throws GridMismatch when the views
/// disagree on geometry or `cell_size` differs from the grids'.
CfProposals foreground_sample_bev(std::span<const BevProposalGrid, 3> grids,
                                  const std::vector<Box7>& gt, double cell_size);

// Scalar loss kernels and their derivatives.

/// 0.5 * d^2 / beta for |d| < beta, |d| - 0.5 * beta otherwise.
double smooth_l1(double delta, double beta = 1.0) noexcept;
double smooth_l1_grad(double delta, double beta = 1.0) noexcept;

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
  double eps = 1e-6;
};

/// Focal penalty on an inconsistency probability delta in [0, 1]:
/// alpha * delta^gamma * -log(1 - min(delta, 1 - eps)).
double focal_consistency(double delta, const FocalParams& p = {}) noexcept;
double focal_consistency_grad(double delta, const FocalParams& p = {}) noexcept;

/// Box consistency: mean over rows of sum over views 2, 3 of the mean
/// SmoothL1 of the seven component differences to view 1. Zero when there
/// are no rows.
double consistency_box_loss(const CfProposals& cf, double beta = 1.0);

/// Score consistency: mean over rows of sum over views 2, 3 of the focal
/// penalty on |sigmoid(c_i) - sigmoid(c_1)|. Zero when there are no rows.
double consistency_cls_loss(const CfProposals& cf, const FocalParams& p = {});

struct ConsistencyWeighting {
  double gamma = 0.0;
  double l_cons = 0.0;
};

/// gamma = 1 / (n_mv - 1), l_cons = gamma * (l_cls_c + l_box_c). Throws
/// DegenerateViews for n_mv < 2.
ConsistencyWeighting consistency_total(double l_cls_c, double l_box_c, std::size_t n_mv);

struct StageOneWeights {
  double cls = 1.0;
  double box = 2.0;
  double dir = 0.2;

  static StageOneWeights point_rcnn() { return {1.0, 1.0, 0.0}; }
  static StageOneWeights pv_rcnn() { return {1.0, 2.0, 0.2}; }
  static StageOneWeights pv_rcnn_plus_plus() { return {1.0, 2.0, 0.0}; }
};

struct StageOneLosses {
  double cls = 0.0;
  double box = 0.0;
  double dir = 0.0;
};

/// l_cons + (1 / n_mv) * (w.cls * cls + w.box * box + w.dir * dir) + l_rcnn.
double total_loss(double l_cons, const StageOneLosses& stage_one, double l_rcnn,
                  const StageOneWeights& weights, std::size_t n_mv);

struct LossBreakdown {
  double l_box_c = 0.0;
  double l_cls_c = 0.0;
  double gamma_mv_c = 0.0;
  double l_cons = 0.0;
  double total = 0.0;
  std::size_t n_fg = 0;
  std::size_t n_mv = 3;
};

LossBreakdown compute_loss_breakdown(const CfProposals& cf, const StageOneLosses& stage_one,
                                     double l_rcnn, const StageOneWeights& weights,
                                     std::size_t n_mv = 3, double beta = 1.0,
                                     const FocalParams& focal = {});

/// One JSON object per frame.
std::string loss_breakdown_json(const std::string& frame_id, const LossBreakdown& b);

}  // namespace sms

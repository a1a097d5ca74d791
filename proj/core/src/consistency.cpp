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

#include "sms/consistency.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "sms/error.hpp"

namespace sms {

CfProposals foreground_sample_points(std::span<const PointCloud, 3> clouds,
                                     std::span<const std::vector<Proposal>, 3> proposals,
                                     const std::vector<Box7>& gt, const KeypointMask& mask) {
  for (std::size_t v = 0; v < 3; ++v) {
    if (proposals[v].size() != clouds[v].size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "view " + std::to_string(v + 1) + " has " +
                      std::to_string(proposals[v].size()) + " proposals for " +
                      std::to_string(clouds[v].size()) + " points");
    }
  }
  CfProposals cf;
  if (gt.empty()) return cf;
  for (std::size_t row = 0; row < mask.triples.size(); ++row) {
    const auto& t = mask.triples[row];
    for (std::size_t v = 0; v < 3; ++v) {
      if (t[v] >= clouds[v].size()) {
        throw Error(ErrorCode::kLengthMismatch,
                    "keypoint row " + std::to_string(row) + " indexes past view " +
                        std::to_string(v + 1));
      }
    }
    // Foreground status is decided on the canonical (view-1) point so all
    // views agree.
    if (!point_in_any_box(clouds[0].points[t[0]], gt)) continue;
    for (std::size_t v = 0; v < 3; ++v) cf.views[v].push_back(proposals[v][t[v]]);
    cf.source.push_back(row);
  }
  return cf;
}

Vec2 BevGrid::center(std::size_t flat) const noexcept {
  const std::size_t ix = flat % nx;
  const std::size_t iy = flat / nx;
  return {x_min + (static_cast<double>(ix) + 0.5) * cell_size,
          y_min + (static_cast<double>(iy) + 0.5) * cell_size};
}

CfProposals foreground_sample_bev(std::span<const BevProposalGrid, 3> grids,
                                  const std::vector<Box7>& gt, double cell_size) {
  for (std::size_t v = 0; v < 3; ++v) {
    if (!(grids[v].grid == grids[0].grid)) {
      throw Error(ErrorCode::kGridMismatch,
                  "view " + std::to_string(v + 1) + " grid geometry differs from view 1");
    }
    if (grids[v].cells.size() != grids[v].grid.cell_count()) {
      throw Error(ErrorCode::kGridMismatch,
                  "view " + std::to_string(v + 1) + " has " +
                      std::to_string(grids[v].cells.size()) + " cells, expected " +
                      std::to_string(grids[v].grid.cell_count()));
    }
  }
  if (grids[0].grid.cell_size != cell_size) {
    throw Error(ErrorCode::kGridMismatch, "cell size does not match the proposal grids");
  }
  CfProposals cf;
  if (gt.empty()) return cf;
  const BevGrid& g = grids[0].grid;
  for (std::size_t flat = 0; flat < g.cell_count(); ++flat) {
    const Vec2 c = g.center(flat);
    const bool fg = std::any_of(gt.begin(), gt.end(),
                                [&](const Box7& b) { return bev_contains(b, c.x, c.y); });
    if (!fg) continue;
    for (std::size_t v = 0; v < 3; ++v) cf.views[v].push_back(grids[v].cells[flat]);
    cf.source.push_back(flat);
  }
  return cf;
}

double smooth_l1(double delta, double beta) noexcept {
  const double a = std::abs(delta);
  return a < beta ? 0.5 * a * a / beta : a - 0.5 * beta;
}

double smooth_l1_grad(double delta, double beta) noexcept {
  const double a = std::abs(delta);
  const double sign = delta < 0 ? -1.0 : 1.0;
  return a < beta ? delta / beta : sign;
}

double focal_consistency(double delta, const FocalParams& p) noexcept {
  const double d = std::min(delta, 1.0 - p.eps);
  return p.alpha * std::pow(delta, p.gamma) * -std::log1p(-d);
}

double focal_consistency_grad(double delta, const FocalParams& p) noexcept {
  if (delta <= 0) return 0.0;
  const double d = std::min(delta, 1.0 - p.eps);
  const double log_term = -std::log1p(-d);
  const double dpow = p.gamma * std::pow(delta, p.gamma - 1.0);
  if (delta >= 1.0 - p.eps) return p.alpha * dpow * log_term;
  return p.alpha * (dpow * log_term + std::pow(delta, p.gamma) / (1.0 - delta));
}

double consistency_box_loss(const CfProposals& cf, double beta) {
  const std::size_t n = cf.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Box7& ref = cf.views[0][j].box;
    for (std::size_t v = 1; v < 3; ++v) {
      const Box7& b = cf.views[v][j].box;
      double per_box = 0.0;
      for (std::size_t c = 0; c < Box7::kNumComponents; ++c) {
        per_box += smooth_l1(std::abs(b.component(c) - ref.component(c)), beta);
      }
      total += per_box / static_cast<double>(Box7::kNumComponents);
    }
  }
  return total / static_cast<double>(n);
}

double consistency_cls_loss(const CfProposals& cf, const FocalParams& p) {
  const std::size_t n = cf.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double ref = cf.views[0][j].score();
    for (std::size_t v = 1; v < 3; ++v) {
      total += focal_consistency(std::abs(cf.views[v][j].score() - ref), p);
    }
  }
  return total / static_cast<double>(n);
}

ConsistencyWeighting consistency_total(double l_cls_c, double l_box_c, std::size_t n_mv) {
  if (n_mv < 2) {
    throw Error(ErrorCode::kDegenerateViews,
                "consistency weighting needs at least 2 views, got " + std::to_string(n_mv));
  }
  ConsistencyWeighting w;
  w.gamma = 1.0 / static_cast<double>(n_mv - 1);
  w.l_cons = w.gamma * (l_cls_c + l_box_c);
  return w;
}

double total_loss(double l_cons, const StageOneLosses& s, double l_rcnn,
                  const StageOneWeights& w, std::size_t n_mv) {
  if (n_mv < 1) throw Error(ErrorCode::kDegenerateViews, "n_mv must be >= 1");
  const double gamma_mv = 1.0 / static_cast<double>(n_mv);
  return l_cons + gamma_mv * (w.cls * s.cls + w.box * s.box + w.dir * s.dir) + l_rcnn;
}

LossBreakdown compute_loss_breakdown(const CfProposals& cf, const StageOneLosses& stage_one,
                                     double l_rcnn, const StageOneWeights& weights,
                                     std::size_t n_mv, double beta, const FocalParams& focal) {
  LossBreakdown b;
  b.n_fg = cf.size();
  b.n_mv = n_mv;
  b.l_box_c = consistency_box_loss(cf, beta);
  b.l_cls_c = consistency_cls_loss(cf, focal);
  const auto w = consistency_total(b.l_cls_c, b.l_box_c, n_mv);
  b.gamma_mv_c = w.gamma;
  b.l_cons = w.l_cons;
  b.total = total_loss(b.l_cons, stage_one, l_rcnn, weights, n_mv);
  return b;
}

std::string loss_breakdown_json(const std::string& frame_id, const LossBreakdown& b) {
  nlohmann::ordered_json j;
  j["frame_id"] = frame_id;
  j["n_fg"] = b.n_fg;
  j["n_mv"] = b.n_mv;
  j["l_box_c"] = b.l_box_c;
  j["l_cls_c"] = b.l_cls_c;
  j["gamma_mv_c"] = b.gamma_mv_c;
  j["l_cons"] = b.l_cons;
  j["total"] = b.total;
  return j.dump();
}

}  // namespace sms

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

#include "sms/gas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sms/error.hpp"

namespace sms {
namespace {

std::optional<std::size_t> cell_count(double lo, double hi, double size) {
  if (!(hi > lo) || !(size > 0)) return std::nullopt;
  const double q = (hi - lo) / size;
  const double r = std::round(q);
  if (r < 1 || std::abs(q - r) > 1e-9 * std::max(1.0, r)) return std::nullopt;
  return static_cast<std::size_t>(r);
}

// Index of v in [lo, lo + n * size] with half-open cells and a closed last
// cell. Settles floor() rounding against the explicit cell bounds.
std::uint32_t axis_cell(double v, double lo, double size, std::size_t n) {
  auto i = static_cast<std::int64_t>(std::floor((v - lo) / size));
  i = std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(n) - 1);
  while (i > 0 && v < lo + static_cast<double>(i) * size) --i;
  while (i + 1 < static_cast<std::int64_t>(n) && v >= lo + static_cast<double>(i + 1) * size) ++i;
  return static_cast<std::uint32_t>(i);
}

}  // namespace

GasConfig GasConfig::kitti() { return GasConfig{}; }

GasConfig GasConfig::wod() {
  GasConfig c;
  c.x_s = -45.0;
  c.x_l = 45.0;
  c.y_s = -45.0;
  c.y_l = 45.0;
  c.x_t = 10.0;
  c.y_t = 10.0;
  c.tau_h = 0.5;
  return c;
}

std::vector<std::string> GasConfig::violations() const {
  std::vector<std::string> v;
  if (!(x_s < x_l)) v.push_back("gas: x_s < x_l required");
  if (!(y_s < y_l)) v.push_back("gas: y_s < y_l required");
  if (!(x_t > 0) || !(y_t > 0)) v.push_back("gas: grid sizes x_t, y_t must be > 0");
  if (x_s < x_l && x_t > 0 && !cell_count(x_s, x_l, x_t)) {
    v.push_back("gas: n_gx = (x_l - x_s) / x_t must be a positive integer");
  }
  if (y_s < y_l && y_t > 0 && !cell_count(y_s, y_l, y_t)) {
    v.push_back("gas: n_gy = (y_l - y_s) / y_t must be a positive integer");
  }
  if (!(tau_h > 0)) v.push_back("gas.tau_h must be > 0");
  return v;
}

void GasConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorCode::kInvalidConfig, msg);
}

std::size_t GasConfig::cells_x() const {
  const auto n = cell_count(x_s, x_l, x_t);
  if (!n) throw Error(ErrorCode::kInvalidConfig, "(x_l - x_s) / x_t is not a positive integer");
  return *n;
}

std::size_t GasConfig::cells_y() const {
  const auto n = cell_count(y_s, y_l, y_t);
  if (!n) throw Error(ErrorCode::kInvalidConfig, "(y_l - y_s) / y_t is not a positive integer");
  return *n;
}

std::optional<GridCell> grid_cell(double x, double y, const GasConfig& cfg) {
  if (x < cfg.x_s || x > cfg.x_l || y < cfg.y_s || y > cfg.y_l) return std::nullopt;
  return GridCell{axis_cell(x, cfg.x_s, cfg.x_t, cfg.cells_x()),
                  axis_cell(y, cfg.y_s, cfg.y_t, cfg.cells_y())};
}

GridAssignment partition_grid(const PointCloud& cloud, const GasConfig& cfg) {
  cfg.validate();
  GridAssignment g;
  g.cells_x = cfg.cells_x();
  g.cells_y = cfg.cells_y();
  g.cell_of.resize(cloud.size());
  g.h_min.assign(g.cells_x * g.cells_y, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    const double x = p.x, y = p.y;
    if (x < cfg.x_s || x > cfg.x_l || y < cfg.y_s || y > cfg.y_l) {
      g.cell_of[i] = GridAssignment::kOutside;
      continue;
    }
    const std::uint32_t ix = axis_cell(x, cfg.x_s, cfg.x_t, g.cells_x);
    const std::uint32_t iy = axis_cell(y, cfg.y_s, cfg.y_t, g.cells_y);
    const auto flat = static_cast<std::uint32_t>(ix * g.cells_y + iy);
    g.cell_of[i] = flat;
    g.h_min[flat] = std::min(g.h_min[flat], static_cast<double>(p.z));
  }
  return g;
}

PointCloud gas_filter(const PointCloud& cloud, const GasConfig& cfg) {
  const GridAssignment g = partition_grid(cloud, cfg);
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.crop_applied = cloud.crop_applied;
  out.points.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::uint32_t cell = g.cell_of[i];
    const Point& p = cloud.points[i];
    if (cell == GridAssignment::kOutside) {
      if (cfg.passthrough_outside) out.points.push_back(p);
      continue;
    }
    if (static_cast<double>(p.z) > g.h_min[cell] + cfg.tau_h) out.points.push_back(p);
  }
  return out;
}

}  // namespace sms

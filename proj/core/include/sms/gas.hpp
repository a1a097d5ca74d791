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
#include <optional>
#include <string>
#include <vector>

#include "sms/point_cloud.hpp"

namespace sms {

/// Ground Abandonment Sampling parameters: a planar grid over
/// [x_s, x_l] x [y_s, y_l] with cell sizes x_t by y_t.
struct GasConfig {
  double x_s = 0.0, x_l = 40.0;
  double y_s = -35.0, y_l = 35.0;
  double x_t = 5.0, y_t = 10.0;
  double tau_h = 0.2;
  /// Points outside the grid coverage are kept unfiltered when true.
  bool passthrough_outside = true;

  static GasConfig kitti();
  static GasConfig wod();

  std::vector<std::string> violations() const;
  void validate() const;

  std::size_t cells_x() const;
  std::size_t cells_y() const;
};

struct GridCell {
  std::uint32_t ix = 0;
  std::uint32_t iy = 0;

  friend bool operator==(GridCell, GridCell) = default;
};

/// Cell of (x, y), or nullopt outside the coverage. Cells are half-open
/// [lo, lo + size) except the last along each axis, which is closed.
std::optional<GridCell> grid_cell(double x, double y, const GasConfig& cfg);

struct GridAssignment {
  std::size_t cells_x = 0;
  std::size_t cells_y = 0;
  /// Flat cell id ix * cells_y + iy per point, or kOutside.
  std::vector<std::uint32_t> cell_of;
  /// Lowest z per flat cell; +inf for empty cells.
  std::vector<double> h_min;

  static constexpr std::uint32_t kOutside = 0xFFFFFFFFu;

  GridCell cell(std::uint32_t flat) const noexcept {
    return {static_cast<std::uint32_t>(flat / cells_y),
            static_cast<std::uint32_t>(flat % cells_y)};
  }
};

GridAssignment partition_grid(const PointCloud& cloud, const GasConfig& cfg);

/// Keeps in-grid points strictly higher than their cell's lowest point plus
/// tau_h; order preserved. Deterministic.
PointCloud gas_filter(const PointCloud& cloud, const GasConfig& cfg);

}  // namespace sms

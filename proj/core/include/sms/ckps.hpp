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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sms/point_cloud.hpp"

namespace sms {

struct CkpsConfig {
  double voxel_size = 0.4;
  /// Strict bound on the infinity norm over (x, y, z, r).
  double tau_v = 0.001;
  /// Voxel grid anchor.
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  std::vector<std::string> violations() const;
  void validate() const;
};

struct VoxelKey {
  std::int32_t ix = 0, iy = 0, iz = 0;

  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  friend auto operator<=>(const VoxelKey&, const VoxelKey&) = default;
};

/// Voxel of a point: floor((coord - origin) / voxel_size) per axis, with
/// half-open voxel bounds [lo, lo + size).
VoxelKey voxel_of(const Point& p, const CkpsConfig& cfg) noexcept;

/// Occupied voxels of one view and the points inside each.
///
/// Keys are stored sorted; the inner index list of every voxel is ascending.
/// Lookup goes through an open-addressing hash index over the key array.
class VoxelHashTable {
 public:
  VoxelHashTable() = default;
  VoxelHashTable(const PointCloud& cloud, const CkpsConfig& cfg);

  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }
  std::span<const VoxelKey> keys() const noexcept { return keys_; }

  /// Inner point indices of `key`; empty span when the voxel is empty.
  std::span<const std::uint32_t> find(const VoxelKey& key) const noexcept;
  bool contains(const VoxelKey& key) const noexcept { return !find(key).empty(); }
  std::span<const std::uint32_t> inner(std::size_t slot) const noexcept;

  double voxel_size() const noexcept { return voxel_size_; }
  const std::array<double, 3>& origin() const noexcept { return origin_; }
  bool same_grid(const VoxelHashTable& other) const noexcept;

 private:
  std::optional<std::size_t> slot_of(const VoxelKey& key) const noexcept;

  double voxel_size_ = 0.0;
  std::array<double, 3> origin_{};
  std::vector<VoxelKey> keys_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> indices_;
  std::vector<std::uint32_t> buckets_;  // slot + 1, 0 = empty
};

VoxelHashTable voxelize(const PointCloud& cloud, const CkpsConfig& cfg);

/// Voxels non-empty in all three tables, ascending. Throws
/// MismatchedConfig when the tables use different grids.
std::vector<VoxelKey> shared_voxels(const VoxelHashTable& a, const VoxelHashTable& b,
                                    const VoxelHashTable& c);

/// One consistent keypoint: an index into each of the three views.
using KeypointTriple = std::array<std::uint32_t, 3>;

struct KeypointMask {
  std::vector<KeypointTriple> triples;
  /// Voxel of each triple, ascending.
  std::vector<VoxelKey> voxels;
  std::size_t shared_voxel_count = 0;

  std::size_t size() const noexcept { return triples.size(); }
};

/// For every shared voxel, the first view-1 inner point (ascending index)
/// that has a match with infinity-norm distance < tau_v in both view 2 and
/// view 3 becomes the keypoint; the lowest matching index is taken in views
/// 2 and 3.
KeypointMask select_keypoints(const PointCloud& view1, const PointCloud& view2,
                              const PointCloud& view3, const CkpsConfig& cfg);

/// Same, reusing prebuilt tables.
KeypointMask select_keypoints(std::span<const PointCloud, 3> views,
                              std::span<const VoxelHashTable, 3> tables,
                              double tau_v);

/// Little-endian u32 count followed by count u32 triples.
std::vector<std::byte> write_mask(const KeypointMask& mask);
std::vector<KeypointTriple> read_mask(std::span<const std::byte> bytes);

}  // namespace sms

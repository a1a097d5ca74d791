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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sms/rng.hpp"

namespace sms {

/// One LiDAR return in the sensor frame: x forward, y left, z up (meters),
/// r reflectivity in [0, 1].
struct Point {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float r = 0.0f;

  friend bool operator==(const Point&, const Point&) = default;
};
static_assert(sizeof(Point) == 16, "Point must match the 16-byte frame record");

struct PointCloud {
  std::vector<Point> points;
  std::string frame_id;
  /// Per-axis flags (x, y, z) recording which crop bounds were applied.
  std::array<bool, 3> crop_applied{false, false, false};

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

/// Bitwise comparison of point payloads (frame metadata ignored).
bool bit_identical(std::span<const Point> a, std::span<const Point> b) noexcept;

struct CropRange {
  double x_min, x_max;
  double y_min, y_max;
  double z_min, z_max;

  bool valid() const noexcept {
    return x_min < x_max && y_min < y_max && z_min < z_max;
  }
  bool contains(const Point& p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max &&
           p.z >= z_min && p.z <= z_max;
  }
};

inline constexpr std::size_t kFrameRecordBytes = 16;

/// Decodes little-endian float32 records (x, y, z, r). Throws
/// TruncatedFrame when the size is not a multiple of 16 and NonFiniteValue
/// on NaN/Inf.
PointCloud read_frame(std::span<const std::byte> bytes, std::string frame_id = {});
std::vector<std::byte> write_frame(const PointCloud& cloud);

/// Writes to `<path>.tmp`, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);

PointCloud load_frame(const std::filesystem::path& path);
/// Writes through a temporary file and renames, so readers never observe a
/// partial frame.
void save_frame(const std::filesystem::path& path, const PointCloud& cloud);

/// Keeps points with min <= coord <= max on every axis, order preserved.
PointCloud crop(const PointCloud& cloud, const CropRange& range);

/// Brings `cloud` to exactly `n_p` points.
///
/// With at least `n_p` input points, a uniformly random subset of distinct
/// indices is kept in input order. With fewer, all points are kept and the
/// deficit is filled with duplicates drawn uniformly with replacement and
/// appended after the originals. Throws EmptyInput when the cloud is empty.
PointCloud random_fixed_count(const PointCloud& cloud, std::size_t n_p, Rng rng);
PointCloud random_fixed_count(const PointCloud& cloud, std::size_t n_p, SampleSeed seed);

}  // namespace sms

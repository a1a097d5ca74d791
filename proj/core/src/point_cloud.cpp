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

#include "sms/point_cloud.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <system_error>

#include "sms/error.hpp"

namespace sms {
namespace {

std::uint32_t load_le32(const std::byte* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  if constexpr (std::endian::native == std::endian::big) {
    v = (v >> 24) | ((v >> 8) & 0xFF00u) | ((v << 8) & 0xFF0000u) | (v << 24);
  }
  return v;
}

void store_le32(std::uint32_t v, std::byte* p) {
  if constexpr (std::endian::native == std::endian::big) {
    v = (v >> 24) | ((v >> 8) & 0xFF00u) | ((v << 8) & 0xFF0000u) | (v << 24);
  }
  std::memcpy(p, &v, 4);
}

}  // namespace

bool bit_identical(std::span<const Point> a, std::span<const Point> b) noexcept {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size_bytes()) == 0);
}

PointCloud read_frame(std::span<const std::byte> bytes, std::string frame_id) {
  if (bytes.size() % kFrameRecordBytes != 0) {
    throw Error(ErrorCode::kTruncatedFrame,
                "frame of " + std::to_string(bytes.size()) +
                    " bytes is not a multiple of 16");
  }
  PointCloud cloud;
  cloud.frame_id = std::move(frame_id);
  const std::size_t n = bytes.size() / kFrameRecordBytes;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::byte* rec = bytes.data() + i * kFrameRecordBytes;
    float v[4];
    for (int c = 0; c < 4; ++c) {
      v[c] = std::bit_cast<float>(load_le32(rec + 4 * c));
      if (!std::isfinite(v[c])) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "non-finite value in point " + std::to_string(i));
      }
    }
    cloud.points[i] = Point{v[0], v[1], v[2], v[3]};
  }
  return cloud;
}

std::vector<std::byte> write_frame(const PointCloud& cloud) {
  std::vector<std::byte> out(cloud.size() * kFrameRecordBytes);
  std::byte* dst = out.data();
  for (const Point& p : cloud.points) {
    store_le32(std::bit_cast<std::uint32_t>(p.x), dst);
    store_le32(std::bit_cast<std::uint32_t>(p.y), dst + 4);
    store_le32(std::bit_cast<std::uint32_t>(p.z), dst + 8);
    store_le32(std::bit_cast<std::uint32_t>(p.r), dst + 12);
    dst += kFrameRecordBytes;
  }
  return out;
}

PointCloud load_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()),
                           static_cast<std::streamsize>(size))) {
    throw Error(ErrorCode::kIoError, "short read on " + path.string());
  }
  return read_frame(bytes, path.stem().string());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "rename failed for " + path.string());
}

void save_frame(const std::filesystem::path& path, const PointCloud& cloud) {
  write_file_atomic(path, write_frame(cloud));
}

PointCloud crop(const PointCloud& cloud, const CropRange& range) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.crop_applied = {true, true, true};
  out.points.reserve(cloud.size());
  std::copy_if(cloud.points.begin(), cloud.points.end(),
               std::back_inserter(out.points),
               [&](const Point& p) { return range.contains(p); });
  return out;
}

PointCloud random_fixed_count(const PointCloud& cloud, std::size_t n_p, Rng rng) {
  if (n_p == 0) throw Error(ErrorCode::kInvalidConfig, "n_p must be positive");
  if (cloud.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot sample " + std::to_string(n_p) +
                                            " points from an empty cloud");
  }
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.crop_applied = cloud.crop_applied;
  const std::size_t n = cloud.size();

  if (n >= n_p) {
    // Partial Fisher-Yates over the index range, then restore input order.
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::size_t i = 0; i < n_p; ++i) {
      const std::size_t j = i + rng.uniform_below(n - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(n_p);
    std::sort(idx.begin(), idx.end());
    out.points.reserve(n_p);
    for (std::uint32_t i : idx) out.points.push_back(cloud.points[i]);
    return out;
  }

  out.points = cloud.points;
  out.points.reserve(n_p);
  for (std::size_t k = n; k < n_p; ++k) {
    out.points.push_back(cloud.points[rng.uniform_below(n)]);
  }
  return out;
}

PointCloud random_fixed_count(const PointCloud& cloud, std::size_t n_p,
                              SampleSeed seed) {
  return random_fixed_count(cloud, n_p, Rng(seed));
}

}  // namespace sms

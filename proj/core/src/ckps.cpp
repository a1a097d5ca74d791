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

#include "sms/ckps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "sms/error.hpp"
#include "sms/rng.hpp"

namespace sms {
namespace {

std::int32_t axis_voxel(double v, double origin, double size) {
  auto k = static_cast<std::int64_t>(std::floor((v - origin) / size));
  while (v < origin + static_cast<double>(k) * size) --k;
  while (v >= origin + static_cast<double>(k + 1) * size) ++k;
  return static_cast<std::int32_t>(k);
}

std::uint64_t hash_key(const VoxelKey& k) noexcept {
  const std::uint64_t a = static_cast<std::uint32_t>(k.ix);
  const std::uint64_t b = static_cast<std::uint32_t>(k.iy);
  const std::uint64_t c = static_cast<std::uint32_t>(k.iz);
  return mix64((a << 32 | b) ^ mix64(c));
}

bool within(const Point& a, const Point& b, double tau) noexcept {
  return std::abs(static_cast<double>(a.x) - b.x) < tau &&
         std::abs(static_cast<double>(a.y) - b.y) < tau &&
         std::abs(static_cast<double>(a.z) - b.z) < tau &&
         std::abs(static_cast<double>(a.r) - b.r) < tau;
}

std::uint32_t load_le32(const std::byte* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  if constexpr (std::endian::native == std::endian::big) {
    v = (v >> 24) | ((v >> 8) & 0xFF00u) | ((v << 8) & 0xFF0000u) | (v << 24);
  }
  return v;
}

void append_le32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

}  // namespace

std::vector<std::string> CkpsConfig::violations() const {
  std::vector<std::string> v;
  if (!(voxel_size > 0)) v.push_back("ckps.voxel_size must be > 0");
  if (!(tau_v > 0)) v.push_back("ckps.tau_v must be > 0");
  for (double o : origin) {
    if (!std::isfinite(o)) {
      v.push_back("ckps.origin must be finite");
      break;
    }
  }
  return v;
}

void CkpsConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorCode::kInvalidConfig, msg);
}

VoxelKey voxel_of(const Point& p, const CkpsConfig& cfg) noexcept {
  return {axis_voxel(p.x, cfg.origin[0], cfg.voxel_size),
          axis_voxel(p.y, cfg.origin[1], cfg.voxel_size),
          axis_voxel(p.z, cfg.origin[2], cfg.voxel_size)};
}

VoxelHashTable::VoxelHashTable(const PointCloud& cloud, const CkpsConfig& cfg)
    : voxel_size_(cfg.voxel_size), origin_(cfg.origin) {
  cfg.validate();
  struct Entry {
    VoxelKey key;
    std::uint32_t index;
  };
  std::vector<Entry> entries(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    entries[i] = {voxel_of(cloud.points[i], cfg), static_cast<std::uint32_t>(i)};
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.index < b.index;
  });

  indices_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].key != entries[i - 1].key) {
      if (i != 0) offsets_.push_back(static_cast<std::uint32_t>(indices_.size()));
      keys_.push_back(entries[i].key);
    }
    indices_.push_back(entries[i].index);
  }
  if (!entries.empty()) offsets_.push_back(static_cast<std::uint32_t>(indices_.size()));

  const std::size_t capacity = std::bit_ceil(std::max<std::size_t>(16, keys_.size() * 2));
  buckets_.assign(capacity, 0);
  for (std::size_t s = 0; s < keys_.size(); ++s) {
    std::size_t b = hash_key(keys_[s]) & (capacity - 1);
    while (buckets_[b] != 0) b = (b + 1) & (capacity - 1);
    buckets_[b] = static_cast<std::uint32_t>(s + 1);
  }
}

std::optional<std::size_t> VoxelHashTable::slot_of(const VoxelKey& key) const noexcept {
  if (buckets_.empty()) return std::nullopt;
  const std::size_t mask = buckets_.size() - 1;
  for (std::size_t b = hash_key(key) & mask;; b = (b + 1) & mask) {
    const std::uint32_t v = buckets_[b];
    if (v == 0) return std::nullopt;
    if (keys_[v - 1] == key) return v - 1;
  }
}

std::span<const std::uint32_t> VoxelHashTable::inner(std::size_t slot) const noexcept {
  return std::span<const std::uint32_t>(indices_).subspan(
      offsets_[slot], offsets_[slot + 1] - offsets_[slot]);
}

std::span<const std::uint32_t> VoxelHashTable::find(const VoxelKey& key) const noexcept {
  const auto slot = slot_of(key);
  if (!slot) return {};
  return inner(*slot);
}

bool VoxelHashTable::same_grid(const VoxelHashTable& other) const noexcept {
  return voxel_size_ == other.voxel_size_ && origin_ == other.origin_;
}

VoxelHashTable voxelize(const PointCloud& cloud, const CkpsConfig& cfg) {
  return VoxelHashTable(cloud, cfg);
}

std::vector<VoxelKey> shared_voxels(const VoxelHashTable& a, const VoxelHashTable& b,
                                    const VoxelHashTable& c) {
  if (!a.same_grid(b) || !a.same_grid(c)) {
    throw Error(ErrorCode::kMismatchedConfig,
                "voxel tables were built with different voxel size or origin");
  }
  std::vector<VoxelKey> out;
  for (const VoxelKey& k : a.keys()) {
    if (b.contains(k) && c.contains(k)) out.push_back(k);
  }
  return out;
}

namespace {

KeypointMask match_shared(const std::array<const PointCloud*, 3>& views,
                          std::span<const VoxelHashTable, 3> tables, double tau_v) {
  const auto shared = shared_voxels(tables[0], tables[1], tables[2]);
  KeypointMask mask;
  mask.shared_voxel_count = shared.size();
  for (const VoxelKey& key : shared) {
    const auto in1 = tables[0].find(key);
    const auto in2 = tables[1].find(key);
    const auto in3 = tables[2].find(key);
    for (std::uint32_t i1 : in1) {
      const Point& p1 = views[0]->points[i1];
      const auto m2 = std::find_if(in2.begin(), in2.end(), [&](std::uint32_t i) {
        return within(views[1]->points[i], p1, tau_v);
      });
      if (m2 == in2.end()) continue;
      const auto m3 = std::find_if(in3.begin(), in3.end(), [&](std::uint32_t i) {
        return within(views[2]->points[i], p1, tau_v);
      });
      if (m3 == in3.end()) continue;
      mask.triples.push_back({i1, *m2, *m3});
      mask.voxels.push_back(key);
      break;
    }
  }
  return mask;
}

}  // namespace

KeypointMask select_keypoints(std::span<const PointCloud, 3> views,
                              std::span<const VoxelHashTable, 3> tables, double tau_v) {
  if (!(tau_v > 0)) throw Error(ErrorCode::kInvalidConfig, "ckps.tau_v must be > 0");
  return match_shared({&views[0], &views[1], &views[2]}, tables, tau_v);
}

KeypointMask select_keypoints(const PointCloud& view1, const PointCloud& view2,
                              const PointCloud& view3, const CkpsConfig& cfg) {
  cfg.validate();
  const std::array<VoxelHashTable, 3> tables = {voxelize(view1, cfg), voxelize(view2, cfg),
                                                voxelize(view3, cfg)};
  return match_shared({&view1, &view2, &view3}, tables, cfg.tau_v);
}

std::vector<std::byte> write_mask(const KeypointMask& mask) {
  std::vector<std::byte> out;
  out.reserve(4 + mask.triples.size() * 12);
  append_le32(out, static_cast<std::uint32_t>(mask.triples.size()));
  for (const auto& t : mask.triples) {
    for (std::uint32_t v : t) append_le32(out, v);
  }
  return out;
}

std::vector<KeypointTriple> read_mask(std::span<const std::byte> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::kParseError, "mask shorter than its header");
  const std::uint32_t count = load_le32(bytes.data());
  if (bytes.size() != 4 + static_cast<std::size_t>(count) * 12) {
    throw Error(ErrorCode::kParseError, "mask size does not match its count");
  }
  std::vector<KeypointTriple> out(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    for (int v = 0; v < 3; ++v) out[i][v] = load_le32(bytes.data() + 4 + 12 * i + 4 * v);
  }
  return out;
}

}  // namespace sms

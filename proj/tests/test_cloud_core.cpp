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

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <limits>
#include <map>

#include "sms/error.hpp"
#include "sms/point_cloud.hpp"
#include "support/scenes.hpp"

namespace {

using sms::Point;
using sms::PointCloud;

std::vector<std::byte> le_record(float x, float y, float z, float r) {
  std::vector<std::byte> out;
  for (float f : {x, y, z, r}) {
    const auto u = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((u >> (8 * i)) & 0xFF));
  }
  return out;
}

sms::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const sms::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sms::Error thrown";
  return sms::ErrorCode::kIoError;
}

TEST(ReadFrame, SingleRecord) {
  const auto bytes = le_record(1.0f, 2.0f, 3.0f, 0.5f);
  const PointCloud c = sms::read_frame(bytes);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.points[0], (Point{1, 2, 3, 0.5f}));
}

TEST(ReadFrame, EmptyBytes) { EXPECT_TRUE(sms::read_frame({}).empty()); }

TEST(ReadFrame, TruncatedRecord) {
  auto bytes = le_record(1, 2, 3, 0.5f);
  bytes.push_back(std::byte{0});
  EXPECT_EQ(code_of([&] { sms::read_frame(bytes); }), sms::ErrorCode::kTruncatedFrame);
}

TEST(ReadFrame, NonFiniteRejected) {
  for (float bad : {std::numeric_limits<float>::quiet_NaN(), std::numeric_limits<float>::infinity(),
                    -std::numeric_limits<float>::infinity()}) {
    auto bytes = le_record(0, 0, 0, 0);
    const auto more = le_record(1, bad, 0, 0);
    bytes.insert(bytes.end(), more.begin(), more.end());
    EXPECT_EQ(code_of([&] { sms::read_frame(bytes); }), sms::ErrorCode::kNonFiniteValue);
  }
}

TEST(WriteFrame, SinglePointIsSixteenBytes) {
  PointCloud c;
  c.points = {{1, 2, 3, 0.5f}};
  const auto bytes = sms::write_frame(c);
  EXPECT_EQ(bytes, le_record(1, 2, 3, 0.5f));
  EXPECT_TRUE(sms::bit_identical(sms::read_frame(bytes).points, c.points));
}

TEST(WriteFrame, EmptyCloud) { EXPECT_TRUE(sms::write_frame(PointCloud{}).empty()); }

TEST(WriteFrame, LargeRoundTripIsBitExact) {
  sms::Rng rng(sms::SampleSeed{11});
  PointCloud c;
  c.points.resize(16384);
  for (auto& p : c.points) {
    // Arbitrary finite bit patterns, including denormals and negative zero.
    auto finite = [&] {
      float f;
      do {
        f = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next_u64()));
      } while (!std::isfinite(f));
      return f;
    };
    p = {finite(), finite(), finite(), finite()};
  }
  c.points[0].x = -0.0f;
  const auto bytes = sms::write_frame(c);
  ASSERT_EQ(bytes.size(), 16384u * 16);
  EXPECT_EQ(sms::write_frame(sms::read_frame(bytes)), bytes);
}

TEST(FrameFile, SaveLoadUsesStemAsId) {
  const auto dir = std::filesystem::temp_directory_path() / "sms_cloud_core_test";
  std::filesystem::create_directories(dir);
  PointCloud c;
  c.points = {{1, 2, 3, 0.25f}, {-4, 5, -6, 1}};
  sms::save_frame(dir / "000042.bin", c);
  const PointCloud back = sms::load_frame(dir / "000042.bin");
  EXPECT_EQ(back.frame_id, "000042");
  EXPECT_TRUE(sms::bit_identical(back.points, c.points));
  EXPECT_FALSE(std::filesystem::exists(dir / "000042.bin.tmp"));
  EXPECT_EQ(code_of([&] { sms::load_frame(dir / "missing.bin"); }), sms::ErrorCode::kIoError);
  std::filesystem::remove_all(dir);
}

TEST(Crop, BoundaryMembership) {
  PointCloud c;
  c.points = {{0, 0, 0, 0}, {50, 0, 0, 0}};
  const sms::CropRange r{0, 40, -10, 10, -5, 5};
  const PointCloud out = sms::crop(c, r);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.points[0], (Point{0, 0, 0, 0}));
}

TEST(Crop, CoveringRangeIsIdentity) {
  sms::Rng rng(sms::SampleSeed{3});
  const PointCloud c = scenes::random_cloud(rng);
  const PointCloud out = sms::crop(c, {-100, 100, -100, 100, -100, 100});
  EXPECT_TRUE(sms::bit_identical(out.points, c.points));
}

TEST(Crop, MatchesPerPointFilterAndIsIdempotent) {
  sms::Rng rng(sms::SampleSeed{4});
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud c = scenes::random_cloud(rng);
    const sms::CropRange r{scenes::uniform(rng, -5, 10), scenes::uniform(rng, 20, 40),
                           scenes::uniform(rng, -30, 0), scenes::uniform(rng, 0, 30),
                           scenes::uniform(rng, -2, -1), scenes::uniform(rng, 0, 1)};
    std::vector<Point> expect;
    for (const Point& p : c.points) {
      const double x = p.x, y = p.y, z = p.z;
      if (x >= r.x_min && x <= r.x_max && y >= r.y_min && y <= r.y_max && z >= r.z_min &&
          z <= r.z_max) {
        expect.push_back(p);
      }
    }
    const PointCloud out = sms::crop(c, r);
    EXPECT_TRUE(sms::bit_identical(out.points, expect));
    EXPECT_TRUE(sms::bit_identical(sms::crop(out, r).points, out.points));
  }
}

std::map<std::tuple<float, float, float, float>, int> multiset(const std::vector<Point>& pts) {
  std::map<std::tuple<float, float, float, float>, int> m;
  for (const Point& p : pts) ++m[{p.x, p.y, p.z, p.r}];
  return m;
}

PointCloud distinct_cloud(std::size_t n) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({static_cast<float>(i), 0, 0, 0});
  return c;
}

TEST(RandomFixedCount, EqualSizeIsSameMultiset) {
  const PointCloud c = distinct_cloud(16384);
  const PointCloud out = sms::random_fixed_count(c, 16384, sms::SampleSeed{1});
  EXPECT_EQ(multiset(out.points), multiset(c.points));
}

TEST(RandomFixedCount, DownsampleIsDistinctSubset) {
  const PointCloud c = distinct_cloud(20000);
  const PointCloud out = sms::random_fixed_count(c, 16384, sms::SampleSeed{2});
  ASSERT_EQ(out.size(), 16384u);
  // Sort-and-scan: strictly increasing x means no index repeats and every x
  // is an input index.
  std::vector<float> xs;
  for (const Point& p : out.points) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  EXPECT_EQ(std::adjacent_find(xs.begin(), xs.end()), xs.end());
  EXPECT_GE(xs.front(), 0.0f);
  EXPECT_LE(xs.back(), 19999.0f);
}

TEST(RandomFixedCount, UpsampleKeepsOriginalsPlusDuplicates) {
  const PointCloud c = distinct_cloud(100);
  const PointCloud out = sms::random_fixed_count(c, 150, sms::SampleSeed{3});
  ASSERT_EQ(out.size(), 150u);
  auto m = multiset(out.points);
  int extra = 0;
  for (const Point& p : c.points) {
    auto it = m.find({p.x, p.y, p.z, p.r});
    ASSERT_NE(it, m.end());
    extra += it->second - 1;
    m.erase(it);
  }
  EXPECT_TRUE(m.empty());
  EXPECT_EQ(extra, 50);
}

TEST(RandomFixedCount, Errors) {
  EXPECT_EQ(code_of([] { sms::random_fixed_count(PointCloud{}, 10, sms::SampleSeed{}); }),
            sms::ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([] { sms::random_fixed_count(distinct_cloud(3), 0, sms::SampleSeed{}); }),
            sms::ErrorCode::kInvalidConfig);
}

TEST(RandomFixedCount, DeterministicUnderSeed) {
  sms::Rng rng(sms::SampleSeed{8});
  const PointCloud c = scenes::random_cloud(rng);
  for (std::size_t n : {std::size_t{1}, c.size() / 2 + 1, c.size() * 3}) {
    const auto a = sms::random_fixed_count(c, n, sms::SampleSeed{77});
    const auto b = sms::random_fixed_count(c, n, sms::SampleSeed{77});
    EXPECT_EQ(a.size(), n);
    EXPECT_TRUE(sms::bit_identical(a.points, b.points));
  }
  const auto a = sms::random_fixed_count(distinct_cloud(1000), 500, sms::SampleSeed{1});
  const auto b = sms::random_fixed_count(distinct_cloud(1000), 500, sms::SampleSeed{2});
  EXPECT_FALSE(sms::bit_identical(a.points, b.points));
}

TEST(RandomFixedCount, DownsampleIsRoughlyUniform) {
  // Each of 10 points should survive a 5-of-10 draw about half the time.
  std::array<int, 10> kept{};
  for (std::uint64_t s = 0; s < 4000; ++s) {
    for (const Point& p : sms::random_fixed_count(distinct_cloud(10), 5, sms::SampleSeed{s}).points) {
      ++kept[static_cast<std::size_t>(p.x)];
    }
  }
  for (int k : kept) EXPECT_NEAR(k, 2000, 200);
}

}  // namespace

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

#include "sms/gas.hpp"
#include "sms/synthetic.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"

namespace {

using sms::GasConfig;
using sms::Point;
using sms::PointCloud;

TEST(GasConfig, KittiGridCounts) {
  const GasConfig c = GasConfig::kitti();
  EXPECT_EQ(c.x_s, 0.0);
  EXPECT_EQ(c.x_l, 40.0);
  EXPECT_EQ(c.y_s, -35.0);
  EXPECT_EQ(c.y_l, 35.0);
  EXPECT_EQ(c.tau_h, 0.2);
  EXPECT_EQ(c.cells_x(), 8u);
  EXPECT_EQ(c.cells_y(), 7u);
}

TEST(GasConfig, WodGridCounts) {
  const GasConfig c = GasConfig::wod();
  EXPECT_EQ(c.cells_x(), 9u);
  EXPECT_EQ(c.cells_y(), 9u);
  EXPECT_EQ(c.tau_h, 0.5);
}

TEST(GasConfig, Violations) {
  GasConfig c;
  c.x_t = 3.0;  // 40 / 3
  c.tau_h = 0;
  c.y_s = 40;   // above y_l
  const auto v = c.violations();
  EXPECT_EQ(v.size(), 3u);
  EXPECT_NE(v[0].find("y_s < y_l"), std::string::npos);
  EXPECT_NE(v[1].find("n_gx"), std::string::npos);
}

TEST(GridCell, UpperBoundaryClampsToLastCell) {
  const GasConfig c;
  EXPECT_EQ(sms::grid_cell(40, 35, c), (sms::GridCell{7, 6}));
  EXPECT_EQ(sms::grid_cell(0, -35, c), (sms::GridCell{0, 0}));
  EXPECT_EQ(sms::grid_cell(5, -25, c), (sms::GridCell{1, 1}));  // half-open lower bound
  EXPECT_FALSE(sms::grid_cell(40.001, 0, c).has_value());
  EXPECT_FALSE(sms::grid_cell(-0.001, 0, c).has_value());
}

TEST(PartitionGrid, MatchesRectangleScan) {
  sms::Rng rng(sms::SampleSeed{31});
  const GasConfig c;
  for (int t = 0; t < 20; ++t) {
    const PointCloud cloud = scenes::random_cloud(rng);
    const auto g = sms::partition_grid(cloud, c);
    std::vector<double> h_min(g.cells_x * g.cells_y, INFINITY);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point& p = cloud.points[i];
      const auto cell = oracle::grid(p.x, p.y, c.x_s, c.x_l, c.y_s, c.y_l, c.x_t, c.y_t);
      if (!cell) {
        EXPECT_EQ(g.cell_of[i], sms::GridAssignment::kOutside);
        continue;
      }
      ASSERT_NE(g.cell_of[i], sms::GridAssignment::kOutside);
      EXPECT_EQ(g.cell(g.cell_of[i]), (sms::GridCell{cell->first, cell->second}));
      auto& h = h_min[cell->first * g.cells_y + cell->second];
      h = std::min(h, static_cast<double>(p.z));
    }
    EXPECT_EQ(g.h_min, h_min);
  }
}

PointCloud column(std::initializer_list<float> zs) {
  PointCloud c;
  for (float z : zs) c.points.push_back({2.0f, 1.0f, z, 0.0f});
  return c;
}

TEST(GasFilter, StrictThresholdExample) {
  const auto out = sms::gas_filter(column({-1.7f, -1.6f, -1.45f, 0.2f}), GasConfig{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.points[0].z, -1.45f);
  EXPECT_EQ(out.points[1].z, 0.2f);
}

TEST(GasFilter, SinglePointCellRemoved) {
  EXPECT_TRUE(sms::gas_filter(column({-1.0f}), GasConfig{}).empty());
}

TEST(GasFilter, FlatCellsLoseEverything) {
  EXPECT_TRUE(sms::gas_filter(column({-1.7f, -1.6f, -1.55f, -1.51f}), GasConfig{}).empty());
}

TEST(GasFilter, OutsidePassthroughIsConfigurable) {
  PointCloud c;
  c.points = {{60, 0, -1.7f, 0}, {2, 1, -1.7f, 0}};
  GasConfig cfg;
  EXPECT_EQ(sms::gas_filter(c, cfg).size(), 1u);
  cfg.passthrough_outside = false;
  EXPECT_TRUE(sms::gas_filter(c, cfg).empty());
}

TEST(GasFilter, MatchesBruteForce) {
  sms::Rng rng(sms::SampleSeed{32});
  for (int t = 0; t < 30; ++t) {
    const PointCloud cloud = scenes::random_cloud(rng, 600);
    GasConfig cfg;
    cfg.passthrough_outside = rng.uniform01() < 0.5;
    cfg.tau_h = scenes::uniform(rng, 0.05, 0.6);
    const auto kept = oracle::gas_kept(cloud, cfg.x_s, cfg.x_l, cfg.y_s, cfg.y_l, cfg.x_t, cfg.y_t,
                                       cfg.tau_h, cfg.passthrough_outside);
    std::vector<Point> expect;
    for (std::size_t i : kept) expect.push_back(cloud.points[i]);
    EXPECT_TRUE(sms::bit_identical(sms::gas_filter(cloud, cfg).points, expect));
  }
}

TEST(GasFilter, RemovesSyntheticGroundKeepsRaisedBoxPoints) {
  sms::SceneParams params;
  params.d_max = 40.0;
  const auto frame = sms::make_scene(params, sms::SampleSeed{33});
  GasConfig cfg;
  cfg.passthrough_outside = false;
  const auto out = sms::gas_filter(frame.cloud, cfg);
  std::size_t raised = 0;
  for (const Point& p : frame.cloud.points) {
    const bool in_grid = p.x >= 0 && p.x <= 40 && p.y >= -35 && p.y <= 35;
    // Ground lies within +-ground_noise of -1.7; anything higher than
    // tau_h above the noise band must survive.
    if (in_grid && p.z > -1.7 + 0.02 + 0.2) ++raised;
  }
  for (const Point& p : out.points) EXPECT_GT(p.z, -1.7f + 0.2f - 0.02f);
  EXPECT_GE(out.size(), raised);
}

}  // namespace

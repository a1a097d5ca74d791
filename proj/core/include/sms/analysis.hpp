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
#include <string_view>
#include <vector>

#include "sms/branches.hpp"
#include "sms/des.hpp"
#include "sms/geometry.hpp"
#include "sms/point_cloud.hpp"

namespace sms {

/// Near high-density rings and far low-density rings (1-based ring ids).
struct RegionSplit {
  std::vector<std::uint32_t> hd{1, 2, 3};
  std::vector<std::uint32_t> ld{4, 5, 6, 7, 8};

  /// Rings 1-3 as HD, the rest as LD.
  static RegionSplit default_for(std::size_t num_rings);

  /// Disjoint and covering 1..num_rings.
  std::vector<std::string> violations(std::size_t num_rings) const;
};

struct RingShare {
  std::uint32_t ring = 0;
  double before_pct = 0.0;
  double after_pct = 0.0;
};

/// Per-ring share (percent of in-ring points) before and after a sampling
/// step. Points beyond tau_far are not counted. An empty cloud yields all
/// zeros.
std::vector<RingShare> region_percentages(const PointCloud& before, const PointCloud& after,
                                          const DesConfig& cfg);

/// Same from per-ring counts (index 0 is ring 1), e.g. summed over frames.
std::vector<RingShare> ring_shares(std::span<const std::size_t> before,
                                   std::span<const std::size_t> after);

enum class SamplingOp : std::uint8_t { kNone = 0, kRandom = 1, kDes = 2, kGas = 3 };
enum class Region : std::uint8_t { kHighDensity = 0, kLowDensity = 1 };

std::string_view to_string(SamplingOp op);
std::string_view to_string(Region region);

struct RegionTally {
  std::size_t all = 0;
  std::size_t foreground = 0;
};

/// Counts in-region points, and those inside any GT box, of one cloud.
std::array<RegionTally, 2> tally_regions(const PointCloud& cloud, const std::vector<Box7>& gt,
                                         const DesConfig& des, const RegionSplit& split);

struct RatioRow {
  Region region = Region::kHighDensity;
  SamplingOp op = SamplingOp::kNone;
  /// Frame-averaged counts.
  double n_all = 0.0;
  double n_fg = 0.0;
  /// Foreground retention against no sampling. Absent for the unsampled
  /// row and when the unsampled foreground count is zero.
  std::optional<double> r1;
  /// Foreground share; absent when n_all is zero.
  std::optional<double> r2;

  friend bool operator==(const RatioRow&, const RatioRow&) = default;
};

struct RatioReport {
  std::size_t frames = 0;
  /// Region-major, then op in enum order.
  std::vector<RatioRow> rows;

  const RatioRow& at(Region region, SamplingOp op) const;

  friend bool operator==(const RatioReport&, const RatioReport&) = default;
};

struct AnalysisFrame {
  PointCloud raw;
  /// Absent labels are an error, an empty list is a frame without objects.
  std::optional<std::vector<Box7>> gt;
};

/// Runs no sampling (crop only), random, DES and GAS on every frame,
/// classifies surviving points as foreground by GT membership and averages
/// counts over frames. Throws NoGroundTruth for frames without labels.
RatioReport ratio_report(std::span<const AnalysisFrame> frames, const BranchConfig& cfg,
                         const RegionSplit& split, SampleSeed seed);

/// Builds the ratios from already-summed counts, indexed [region][op].
RatioReport make_ratio_report(const std::array<std::array<double, 4>, 2>& n_all,
                              const std::array<std::array<double, 4>, 2>& n_fg,
                              std::size_t frames);

enum class ReportFormat { kCsv, kJson, kTable };

/// kCsv: long format `region,op,n_all,n_fg,r1,r2` with counts rounded for
/// display, r1 of the unsampled row as "-", missing ratios empty.
/// kJson: exact counts, explicit nulls.
/// kTable: one column per region/op pair, rows n_all, n_fg, r1, r2.
std::string emit_report(const RatioReport& report, ReportFormat format);
RatioReport parse_report_json(std::string_view json);

std::string emit_ring_shares_csv(const std::vector<RingShare>& shares);

}  // namespace sms

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

#include "sms/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "sms/error.hpp"

namespace sms {

RegionSplit RegionSplit::default_for(std::size_t num_rings) {
  RegionSplit s;
  s.hd.clear();
  s.ld.clear();
  for (std::uint32_t j = 1; j <= num_rings; ++j) (j <= 3 ? s.hd : s.ld).push_back(j);
  return s;
}

std::vector<std::string> RegionSplit::violations(std::size_t num_rings) const {
  std::vector<std::string> v;
  std::set<std::uint32_t> seen;
  for (const auto* list : {&hd, &ld}) {
    for (std::uint32_t j : *list) {
      if (j < 1 || j > num_rings) v.push_back("region ring " + std::to_string(j) + " out of range");
      if (!seen.insert(j).second) v.push_back("ring " + std::to_string(j) + " in both regions");
    }
  }
  if (seen.size() != num_rings) v.push_back("regions must cover every ring");
  return v;
}

std::vector<RingShare> ring_shares(std::span<const std::size_t> before,
                                   std::span<const std::size_t> after) {
  if (before.size() != after.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ring count vectors differ in length");
  }
  std::size_t tb = 0, ta = 0;
  for (std::size_t c : before) tb += c;
  for (std::size_t c : after) ta += c;
  std::vector<RingShare> out(before.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].ring = static_cast<std::uint32_t>(j + 1);
    out[j].before_pct = tb > 0 ? 100.0 * static_cast<double>(before[j]) / static_cast<double>(tb) : 0.0;
    out[j].after_pct = ta > 0 ? 100.0 * static_cast<double>(after[j]) / static_cast<double>(ta) : 0.0;
  }
  return out;
}

std::vector<RingShare> region_percentages(const PointCloud& before, const PointCloud& after,
                                          const DesConfig& cfg) {
  return ring_shares(partition_rings(before, cfg).counts, partition_rings(after, cfg).counts);
}

std::string_view to_string(SamplingOp op) {
  switch (op) {
    case SamplingOp::kNone: return "none";
    case SamplingOp::kRandom: return "random";
    case SamplingOp::kDes: return "des";
    case SamplingOp::kGas: return "gas";
  }
  return "?";
}

std::string_view to_string(Region region) {
  return region == Region::kHighDensity ? "HD" : "LD";
}

std::array<RegionTally, 2> tally_regions(const PointCloud& cloud, const std::vector<Box7>& gt,
                                         const DesConfig& des, const RegionSplit& split) {
  const std::size_t n_r = des.num_rings();
  std::vector<int> region_of(n_r + 1, -1);
  for (std::uint32_t j : split.hd) region_of.at(j) = 0;
  for (std::uint32_t j : split.ld) region_of.at(j) = 1;

  std::array<RegionTally, 2> t{};
  for (const Point& p : cloud.points) {
    const std::uint32_t ring = ring_index(planar_distance(p), des);
    if (ring == kOutsideRings || region_of[ring] < 0) continue;
    RegionTally& r = t[static_cast<std::size_t>(region_of[ring])];
    ++r.all;
    if (point_in_any_box(p, gt)) ++r.foreground;
  }
  return t;
}

const RatioRow& RatioReport::at(Region region, SamplingOp op) const {
  for (const auto& r : rows) {
    if (r.region == region && r.op == op) return r;
  }
  throw std::out_of_range("no such ratio row");
}

RatioReport make_ratio_report(const std::array<std::array<double, 4>, 2>& n_all,
                              const std::array<std::array<double, 4>, 2>& n_fg,
                              std::size_t frames) {
  RatioReport report;
  report.frames = frames;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t o = 0; o < 4; ++o) {
      RatioRow row;
      row.region = static_cast<Region>(r);
      row.op = static_cast<SamplingOp>(o);
      row.n_all = n_all[r][o];
      row.n_fg = n_fg[r][o];
      if (o != 0 && n_fg[r][0] > 0) row.r1 = n_fg[r][o] / n_fg[r][0];
      if (row.n_all > 0) row.r2 = row.n_fg / row.n_all;
      report.rows.push_back(row);
    }
  }
  return report;
}

RatioReport ratio_report(std::span<const AnalysisFrame> frames, const BranchConfig& cfg,
                         const RegionSplit& split, SampleSeed seed) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyInput, "ratio report needs at least one frame");
  const auto split_issues = split.violations(cfg.des.num_rings());
  if (!split_issues.empty()) throw Error(ErrorCode::kInvalidConfig, split_issues.front());

  std::array<std::array<double, 4>, 2> all{}, fg{};
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const AnalysisFrame& frame = frames[f];
    if (!frame.gt) {
      throw Error(ErrorCode::kNoGroundTruth,
                  "frame " + std::to_string(f) + " ('" + frame.raw.frame_id + "') has no labels");
    }
    const std::string label =
        frame.raw.frame_id.empty() ? "#" + std::to_string(f) : frame.raw.frame_id;
    const MultiViewSet views = run_branches(frame.raw, cfg, derive_seed(seed, label), false);
    const PointCloud* clouds[4] = {&views.cropped, &views.pv1, &views.pv2, &views.pv3};
    for (std::size_t o = 0; o < 4; ++o) {
      const auto t = tally_regions(*clouds[o], *frame.gt, cfg.des, split);
      for (std::size_t r = 0; r < 2; ++r) {
        all[r][o] += static_cast<double>(t[r].all);
        fg[r][o] += static_cast<double>(t[r].foreground);
      }
    }
  }
  const double n = static_cast<double>(frames.size());
  for (auto* table : {&all, &fg}) {
    for (auto& region : *table) {
      for (double& v : region) v /= n;
    }
  }
  return make_ratio_report(all, fg, frames.size());
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string rounded_count(double v) { return fixed(std::round(v), 0); }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string emit_report(const RatioReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv: {
      std::string out = "region,op,n_all,n_fg,r1,r2\n";
      for (const auto& row : report.rows) {
        out += std::string(to_string(row.region)) + ',' + std::string(to_string(row.op)) + ',' +
               rounded_count(row.n_all) + ',' + rounded_count(row.n_fg) + ',';
        if (row.op == SamplingOp::kNone) {
          out += '-';
        } else if (row.r1) {
          out += fixed(*row.r1, 6);
        }
        out += ',';
        if (row.r2) out += fixed(*row.r2, 6);
        out += '\n';
      }
      return out;
    }
    case ReportFormat::kJson: {
      nlohmann::ordered_json j;
      j["schema"] = "sms.ratio_report/1";
      j["frames"] = report.frames;
      j["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["region"] = to_string(row.region);
        r["op"] = to_string(row.op);
        r["n_all"] = row.n_all;
        r["n_fg"] = row.n_fg;
        r["r1"] = opt_json(row.r1);
        r["r2"] = opt_json(row.r2);
        j["rows"].push_back(std::move(r));
      }
      return j.dump(2) + "\n";
    }
    case ReportFormat::kTable: {
      std::string header = "metric";
      std::string lines[4] = {"n_all", "n_fg", "r1", "r2"};
      for (const auto& row : report.rows) {
        header += ',' + std::string(to_string(row.region)) + "_S" +
                  std::to_string(static_cast<int>(row.op));
        lines[0] += ',' + rounded_count(row.n_all);
        lines[1] += ',' + rounded_count(row.n_fg);
        lines[2] += ',' + (row.op == SamplingOp::kNone
                               ? std::string("-")
                               : (row.r1 ? fixed(100.0 * *row.r1, 1) + '%' : std::string()));
        lines[3] += ',' + (row.r2 ? fixed(100.0 * *row.r2, 1) + '%' : std::string());
      }
      std::string out = header + '\n';
      for (const auto& l : lines) out += l + '\n';
      return out;
    }
  }
  return {};
}

RatioReport parse_report_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RatioReport report;
    report.frames = j.at("frames").get<std::size_t>();
    for (const auto& r : j.at("rows")) {
      RatioRow row;
      const auto region = r.at("region").get<std::string>();
      if (region == "HD") {
        row.region = Region::kHighDensity;
      } else if (region == "LD") {
        row.region = Region::kLowDensity;
      } else {
        throw Error(ErrorCode::kParseError, "unknown region '" + region + "'");
      }
      const auto op = r.at("op").get<std::string>();
      bool known = false;
      for (int o = 0; o < 4; ++o) {
        if (to_string(static_cast<SamplingOp>(o)) == op) {
          row.op = static_cast<SamplingOp>(o);
          known = true;
        }
      }
      if (!known) throw Error(ErrorCode::kParseError, "unknown op '" + op + "'");
      row.n_all = r.at("n_all").get<double>();
      row.n_fg = r.at("n_fg").get<double>();
      if (!r.at("r1").is_null()) row.r1 = r.at("r1").get<double>();
      if (!r.at("r2").is_null()) row.r2 = r.at("r2").get<double>();
      report.rows.push_back(row);
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::string emit_ring_shares_csv(const std::vector<RingShare>& shares) {
  std::string out = "ring,before_pct,after_pct\n";
  for (const auto& s : shares) {
    out += std::to_string(s.ring) + ',' + fixed(s.before_pct, 6) + ',' + fixed(s.after_pct, 6) + '\n';
  }
  return out;
}

}  // namespace sms

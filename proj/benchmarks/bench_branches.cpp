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

#include <benchmark/benchmark.h>

#include "sms/branches.hpp"
#include "sms/synthetic.hpp"

namespace {

// About 120k points per frame.
const sms::PointCloud& dense_frame() {
  static const sms::PointCloud cloud = [] {
    sms::SceneParams p;
    p.density_scale = 10800;
    return sms::make_scene(p, sms::SampleSeed{11}).cloud;
  }();
  return cloud;
}

const sms::BranchConfig& cfg() {
  static const sms::BranchConfig c = sms::BranchConfig::kitti();
  return c;
}

void BM_Crop(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sms::crop(dense_frame(), cfg().crop));
  state.counters["points"] = static_cast<double>(dense_frame().size());
}

void BM_Random(benchmark::State& state) {
  const auto c = sms::crop(dense_frame(), cfg().crop);
  std::uint64_t s = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sms::random_fixed_count(c, cfg().n_p, sms::SampleSeed{++s}));
}

void BM_Des(benchmark::State& state) {
  const auto c = sms::crop(dense_frame(), cfg().crop);
  std::uint64_t s = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sms::des_sample(c, cfg().des, sms::SampleSeed{++s}));
}

void BM_Gas(benchmark::State& state) {
  const auto c = sms::crop(dense_frame(), cfg().crop);
  for (auto _ : state) benchmark::DoNotOptimize(sms::gas_filter(c, cfg().gas));
}

void BM_Ckps(benchmark::State& state) {
  const auto v = sms::run_branches(dense_frame(), cfg(), sms::SampleSeed{1}, false);
  for (auto _ : state) benchmark::DoNotOptimize(sms::select_keypoints(v.pv1, v.pv2, v.pv3, cfg().ckps));
}

void BM_RunBranches(benchmark::State& state) {
  const bool keypoints = state.range(0) != 0;
  std::uint64_t s = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sms::run_branches(dense_frame(), cfg(), sms::SampleSeed{++s}, keypoints));
  }
}

}  // namespace

BENCHMARK(BM_Crop)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Random)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Des)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gas)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ckps)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunBranches)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

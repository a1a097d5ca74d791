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
#include <string_view>

namespace sms {

struct SampleSeed {
  std::uint64_t value = 0;

  friend bool operator==(SampleSeed, SampleSeed) = default;
};

/// Philox4x32-10 block function (Salmon et al., Random123). Exposed for
/// known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// A stream is identified by (seed, stream id); the n-th output is a pure
/// function of (seed, stream id, n). Streams never share state, so
/// sub-streams derived with `split` can be consumed in any order or on any
/// thread without changing results. Bounded integers and unit doubles are
/// produced with fixed arithmetic (no std:: distributions) so the sequence is
/// identical across standard libraries.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "philox4x32-10/stream-v1";

  explicit Rng(SampleSeed seed, std::uint64_t stream = 0) noexcept
      : seed_(seed.value), stream_(stream) {}

  /// Independent child stream keyed by `id`.
  Rng split(std::uint64_t id) const noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform integer in [0, bound). `bound` must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform01() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> block_{};
  std::size_t cursor_ = 4;
};

/// SplitMix64 finalizer; used to derive stream ids from labels.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stable 64-bit FNV-1a hash of a string (frame ids, stage names).
std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace sms

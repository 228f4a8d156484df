// Copyright 2026 The Symile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace symile {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Counter-based pseudo random generator.
///
/// Each stream is a (key, counter) pair; the n-th output is a SplitMix64
/// finalizer applied to key + n * golden_gamma. Substreams derive a fresh key
/// from (parent key, tag), so consumers that draw from different purposes
/// never perturb each other. Output is identical on every platform because
/// all distributions below are implemented here rather than taken from
/// <random>.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  /// Independent stream named by a purpose tag ("data", "masks", ...).
  [[nodiscard]] Rng substream(std::string_view tag) const noexcept;
  /// Independent stream named by an index (epoch, anchor, shard, ...).
  [[nodiscard]] Rng substream(std::uint64_t index) const noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  bool bernoulli(double p) noexcept;
  /// Unbiased integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Uniformly random permutation of 0..n-1 (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n);

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  Rng(std::uint64_t key, std::uint64_t counter) noexcept
      : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace symile

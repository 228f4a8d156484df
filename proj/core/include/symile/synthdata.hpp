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
#include <string>
#include <vector>

#include "symile/info_oracle.hpp"
#include "symile/linalg.hpp"

namespace symile {

/// Generation parameters carried along with a dataset.
struct DatasetInfo {
  std::string kind;  // "xor1d" | "synth5d"
  std::uint64_t seed = 0;
  double p_hat = 1.0;
  IMode i_mode = IMode::shared;
  double missing_p = 0.0;
};

/// N samples of M modality vectors (bits stored as 0.0 / 1.0).
struct Dataset {
  DatasetInfo info;
  std::vector<std::string> names;
  std::vector<Matrix> modalities;
  /// Hidden switch draws, N x 1 (shared) or N x dims (per coordinate); may be empty.
  Matrix latents;
  /// Row-major N x M observation flags (1 = observed); empty when fully observed.
  std::vector<std::uint8_t> masks;

  [[nodiscard]] std::size_t size() const noexcept { return modalities.empty() ? 0 : modalities.front().rows(); }
  [[nodiscard]] std::size_t num_modalities() const noexcept { return modalities.size(); }
  [[nodiscard]] bool has_masks() const noexcept { return !masks.empty(); }
  [[nodiscard]] bool observed(std::size_t sample, std::size_t modality) const noexcept {
    return masks.empty() || masks[sample * modalities.size() + modality] != 0;
  }
  [[nodiscard]] bool complete(std::size_t sample) const noexcept;

  /// Throws InvalidArgument when shapes disagree.
  void validate() const;

  [[nodiscard]] Dataset slice(std::size_t begin, std::size_t end) const;
  [[nodiscard]] Dataset gather(const std::vector<std::size_t>& rows) const;
  /// Samples with every modality observed.
  [[nodiscard]] Dataset complete_rows() const;
};

struct SplitSpec {
  std::size_t train = 10000;
  std::size_t val = 1000;
  std::size_t test = 5000;

  [[nodiscard]] std::size_t total() const noexcept { return train + val + test; }
};

struct DatasetSplits {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// a, b fair bits and c = a XOR b, each a 1-dim vector.
Dataset gen_xor1d(std::size_t n, std::uint64_t seed);

/// a, b in {0,1}^dims fair bits, i ~ Bernoulli(p_hat),
/// c_j = (a_j XOR b_j)^i * a_j^(1-i). Latents record i.
Dataset gen_synth5d(std::size_t n, double p_hat, std::uint64_t seed, IMode mode = IMode::shared,
                    int dims = 5);

/// Masks each (sample, modality) cell independently with probability
/// p_missing; masked vectors are zero-filled.
Dataset apply_missingness(const Dataset& d, double p_missing, std::uint64_t seed);

/// Contiguous train / val / test slices in generation order.
DatasetSplits split(const Dataset& d, const SplitSpec& spec);

/// Encoder input for one modality: the values, optionally followed by one
/// indicator column (1 = modality missing).
Matrix encoder_input(const Dataset& d, std::size_t modality, bool with_indicator);

/// Integer code of a bit vector (first coordinate least significant).
std::size_t binary_code(std::span<const double> bits);

/// All 2^dims bit vectors, row k holding the bits of k.
Matrix all_binary_vectors(std::size_t dims);

}  // namespace symile

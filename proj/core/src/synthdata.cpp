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

#include "symile/synthdata.hpp"

#include <string>

#include "symile/error.hpp"
#include "symile/rng.hpp"

namespace symile {

bool Dataset::complete(std::size_t sample) const noexcept {
  for (std::size_t m = 0; m < modalities.size(); ++m) {
    if (!observed(sample, m)) return false;
  }
  return true;
}

void Dataset::validate() const {
  if (names.size() != modalities.size()) throw InvalidArgument("Dataset: names/modalities count mismatch");
  const std::size_t n = size();
  for (const auto& m : modalities) {
    if (m.rows() != n) throw InvalidArgument("Dataset: modalities disagree on sample count");
  }
  if (!latents.empty() && latents.rows() != n) throw InvalidArgument("Dataset: latents row count mismatch");
  if (!masks.empty() && masks.size() != n * modalities.size()) {
    throw InvalidArgument("Dataset: mask shape mismatch");
  }
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw InvalidArgument("Dataset::slice: range out of bounds");
  Dataset out;
  out.info = info;
  out.names = names;
  for (const auto& m : modalities) out.modalities.push_back(m.slice_rows(begin, end));
  if (!latents.empty()) out.latents = latents.slice_rows(begin, end);
  if (!masks.empty()) {
    const std::size_t mm = modalities.size();
    out.masks.assign(masks.begin() + static_cast<std::ptrdiff_t>(begin * mm),
                     masks.begin() + static_cast<std::ptrdiff_t>(end * mm));
  }
  return out;
}

Dataset Dataset::gather(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.info = info;
  out.names = names;
  for (const auto& m : modalities) out.modalities.push_back(m.gather_rows(rows));
  if (!latents.empty()) out.latents = latents.gather_rows(rows);
  if (!masks.empty()) {
    const std::size_t mm = modalities.size();
    for (auto r : rows) {
      for (std::size_t k = 0; k < mm; ++k) out.masks.push_back(masks[r * mm + k]);
    }
  }
  return out;
}

Dataset Dataset::complete_rows() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (complete(i)) rows.push_back(i);
  }
  return gather(rows);
}

Dataset gen_xor1d(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("gen_xor1d: n must be >= 1");
  Dataset d;
  d.info = DatasetInfo{"xor1d", seed, 1.0, IMode::shared, 0.0};
  d.names = {"a", "b", "c"};
  d.modalities.assign(3, Matrix(n, 1));
  Rng rng = Rng(seed).substream("data");
  for (std::size_t s = 0; s < n; ++s) {
    const bool a = rng.bernoulli(0.5);
    const bool b = rng.bernoulli(0.5);
    d.modalities[0](s, 0) = a ? 1.0 : 0.0;
    d.modalities[1](s, 0) = b ? 1.0 : 0.0;
    d.modalities[2](s, 0) = (a != b) ? 1.0 : 0.0;
  }
  return d;
}

Dataset gen_synth5d(std::size_t n, double p_hat, std::uint64_t seed, IMode mode, int dims) {
  if (n < 1) throw InvalidArgument("gen_synth5d: n must be >= 1");
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw InvalidArgument("gen_synth5d: p_hat must lie in [0, 1]");
  if (dims < 1) throw InvalidArgument("gen_synth5d: dims must be >= 1");
  const auto d = static_cast<std::size_t>(dims);

  Dataset out;
  out.info = DatasetInfo{"synth5d", seed, p_hat, mode, 0.0};
  out.names = {"a", "b", "c"};
  out.modalities.assign(3, Matrix(n, d));
  out.latents = Matrix(n, mode == IMode::shared ? 1 : d);
  auto& a = out.modalities[0];
  auto& b = out.modalities[1];
  auto& c = out.modalities[2];

  Rng rng = Rng(seed).substream("data");
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < d; ++j) a(s, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (std::size_t j = 0; j < d; ++j) b(s, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    if (mode == IMode::shared) {
      out.latents(s, 0) = rng.bernoulli(p_hat) ? 1.0 : 0.0;
    } else {
      for (std::size_t j = 0; j < d; ++j) out.latents(s, j) = rng.bernoulli(p_hat) ? 1.0 : 0.0;
    }
    for (std::size_t j = 0; j < d; ++j) {
      const bool i = out.latents(s, mode == IMode::shared ? 0 : j) != 0.0;
      const bool aj = a(s, j) != 0.0;
      const bool bj = b(s, j) != 0.0;
      c(s, j) = (i ? (aj != bj) : aj) ? 1.0 : 0.0;
    }
  }
  return out;
}

Dataset apply_missingness(const Dataset& d, double p_missing, std::uint64_t seed) {
  if (!(p_missing >= 0.0 && p_missing < 1.0)) {
    throw InvalidArgument("apply_missingness: p_missing must lie in [0, 1)");
  }
  d.validate();
  Dataset out = d;
  out.info.missing_p = p_missing;
  const std::size_t n = d.size();
  const std::size_t mm = d.num_modalities();
  out.masks.assign(n * mm, 1);
  Rng rng = Rng(seed).substream("masks");
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t m = 0; m < mm; ++m) {
      const bool missing = rng.bernoulli(p_missing) || !d.observed(s, m);
      if (missing) {
        out.masks[s * mm + m] = 0;
        for (double& v : out.modalities[m].row(s)) v = 0.0;
      }
    }
  }
  return out;
}

DatasetSplits split(const Dataset& d, const SplitSpec& spec) {
  if (spec.train < 1 || spec.val < 1 || spec.test < 1) throw InvalidArgument("split: every split needs >= 1 sample");
  if (spec.total() != d.size()) {
    throw InvalidArgument("split: sizes sum to " + std::to_string(spec.total()) + " but dataset has " +
                          std::to_string(d.size()) + " samples");
  }
  return DatasetSplits{d.slice(0, spec.train), d.slice(spec.train, spec.train + spec.val),
                       d.slice(spec.train + spec.val, d.size())};
}

Matrix encoder_input(const Dataset& d, std::size_t modality, bool with_indicator) {
  if (modality >= d.num_modalities()) throw InvalidArgument("encoder_input: modality out of range");
  const Matrix& x = d.modalities[modality];
  if (!with_indicator) return x;
  Matrix out(x.rows(), x.cols() + 1);
  for (std::size_t s = 0; s < x.rows(); ++s) {
    auto src = x.row(s);
    auto dst = out.row(s);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[x.cols()] = d.observed(s, modality) ? 0.0 : 1.0;
  }
  return out;
}

std::size_t binary_code(std::span<const double> bits) {
  std::size_t code = 0;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] != 0.0) code |= std::size_t{1} << j;
  }
  return code;
}

Matrix all_binary_vectors(std::size_t dims) {
  if (dims > 20) throw CapacityError("all_binary_vectors: too many dimensions");
  const std::size_t n = std::size_t{1} << dims;
  Matrix out(n, dims);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < dims; ++j) out(k, j) = ((k >> j) & 1U) ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace symile

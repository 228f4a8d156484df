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
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "symile/linalg.hpp"

namespace symile {

class Rng;

/// How negatives are formed for the anchor modality.
///  on_permute: shuffle each non-anchor modality within the batch (N-1 negatives).
///  on_squared: every combination of the two non-anchor modalities (N^2-1
///              negatives); three modalities only.
enum class NegativeStrategy { on_permute, on_squared };

std::string_view to_string(NegativeStrategy s) noexcept;
NegativeStrategy parse_strategy(std::string_view text);

/// Multilinear inner product: sum_d prod_m v[m][d].
double mip(std::span<const std::span<const double>> vectors);
double mip(std::initializer_list<std::span<const double>> vectors);

/// Per-anchor scores; row i is a softmax over candidates whose target is targets[i].
struct LogitsMatrix {
  Matrix logits;
  std::vector<std::size_t> targets;
};

/// perms[m] is the within-batch permutation for modality m (perms[anchor] is
/// ignored). Column j scores the anchor against the tuple {m[perms[m][j]]};
/// the diagonal is then overwritten with the matched tuple, so fixed points
/// of a permutation show up as negatives equal to a positive.
LogitsMatrix build_logits_on(std::size_t anchor, const std::vector<Matrix>& reps,
                             const std::vector<std::vector<std::size_t>>& perms, double scale);

/// Three modalities: row i holds scale * <x_i, y_j, z_k> at column j*N + k,
/// where y and z are the non-anchor modalities in index order; target i*N + i.
LogitsMatrix build_logits_on2(std::size_t anchor, const std::vector<Matrix>& reps, double scale);

/// Mean over rows of softmax cross-entropy.
double mean_row_cross_entropy(const LogitsMatrix& lm);

/// Loss value with gradients with respect to each representation matrix and
/// the logit multiplier.
struct LossGrad {
  double loss = 0.0;
  std::vector<double> per_term;
  std::vector<Matrix> d_reps;
  double d_scale = 0.0;
};

/// 1/2 [l(x->y) + l(y->x)] with logits scale * rx ry^T.
double clip_pair_loss(const Matrix& rx, const Matrix& ry, double scale);
/// per_term = {l(x->y), l(y->x)}.
LossGrad clip_pair_loss_grad(const Matrix& rx, const Matrix& ry, double scale);

/// Sum of clip_pair_loss over all unordered modality pairs.
double pairwise_clip_loss(const std::vector<Matrix>& reps, double scale);
LossGrad pairwise_clip_loss_grad(const std::vector<Matrix>& reps, double scale);

/// perms[anchor][modality]; the anchor's own slot is left empty.
using AnchorPermutations = std::vector<std::vector<std::vector<std::size_t>>>;

/// Fresh permutations for every anchor. Each call advances `rng` once and
/// derives one substream per anchor, drawing non-anchor modalities in index order.
AnchorPermutations draw_permutations(std::size_t num_modalities, std::size_t n, Rng& rng);
AnchorPermutations identity_permutations(std::size_t num_modalities, std::size_t n);

struct SymileLoss {
  double loss = 0.0;
  std::vector<double> per_anchor;
};

SymileLoss symile_loss(const std::vector<Matrix>& reps, double scale, NegativeStrategy strategy, Rng& rng);
/// Same with caller-supplied permutations (ignored for on_squared).
SymileLoss symile_loss(const std::vector<Matrix>& reps, double scale, NegativeStrategy strategy,
                       const AnchorPermutations& perms);
LossGrad symile_loss_grad(const std::vector<Matrix>& reps, double scale, NegativeStrategy strategy,
                          const AnchorPermutations& perms);

}  // namespace symile

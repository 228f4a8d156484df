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

#include <string_view>
#include <vector>

#include "symile/linalg.hpp"
#include "symile/numcore.hpp"
#include "symile/objectives.hpp"

namespace symile {

enum class Objective { symile, pairwise_clip };

std::string_view to_string(Objective o) noexcept;
Objective parse_objective(std::string_view text);

/// Representations of every modality (rows are samples).
std::vector<Matrix> encode_all(const ModelParams& params, const std::vector<Matrix>& inputs);

struct BatchLoss {
  double loss = 0.0;
  std::vector<double> per_term;
};

struct BatchLossGrad {
  double loss = 0.0;
  std::vector<double> per_term;
  ModelParams grad;
};

/// Loss of one batch through encoders -> (normalize) -> objective at logit
/// multiplier exp(t). `perms` is only read by the symile on_permute path.
BatchLoss model_loss(const ModelParams& params, const std::vector<Matrix>& inputs, Objective objective,
                     NegativeStrategy strategy, const AnchorPermutations& perms);

/// Same loss plus its exact gradient with respect to every parameter.
BatchLossGrad model_loss_grad(const ModelParams& params, const std::vector<Matrix>& inputs, Objective objective,
                              NegativeStrategy strategy, const AnchorPermutations& perms);

}  // namespace symile

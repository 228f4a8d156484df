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

#include "symile/model.hpp"

#include <string>

#include "symile/error.hpp"

namespace symile {

std::string_view to_string(Objective o) noexcept { return o == Objective::symile ? "symile" : "clip"; }

Objective parse_objective(std::string_view text) {
  if (text == "symile") return Objective::symile;
  if (text == "clip" || text == "pairwise_clip") return Objective::pairwise_clip;
  throw InvalidArgument("unknown objective '" + std::string(text) + "' (expected symile|clip)");
}

std::vector<Matrix> encode_all(const ModelParams& params, const std::vector<Matrix>& inputs) {
  if (inputs.size() != params.encoders.size()) throw InvalidArgument("encode_all: one input per encoder expected");
  std::vector<Matrix> reps;
  reps.reserve(inputs.size());
  for (std::size_t m = 0; m < inputs.size(); ++m) reps.push_back(encode(params.encoders[m], inputs[m]).out);
  return reps;
}

BatchLoss model_loss(const ModelParams& params, const std::vector<Matrix>& inputs, Objective objective,
                     NegativeStrategy strategy, const AnchorPermutations& perms) {
  const auto reps = encode_all(params, inputs);
  const double scale = params.scale();
  if (objective == Objective::pairwise_clip) return BatchLoss{pairwise_clip_loss(reps, scale), {}};
  auto s = symile_loss(reps, scale, strategy, perms);
  return BatchLoss{s.loss, std::move(s.per_anchor)};
}

BatchLossGrad model_loss_grad(const ModelParams& params, const std::vector<Matrix>& inputs, Objective objective,
                              NegativeStrategy strategy, const AnchorPermutations& perms) {
  if (inputs.size() != params.encoders.size()) {
    throw InvalidArgument("model_loss_grad: one input per encoder expected");
  }
  std::vector<EncodedBatch> fwd;
  std::vector<Matrix> reps;
  for (std::size_t m = 0; m < inputs.size(); ++m) {
    fwd.push_back(encode(params.encoders[m], inputs[m]));
    reps.push_back(fwd.back().out);
  }
  const double scale = params.scale();
  const LossGrad lg = objective == Objective::pairwise_clip ? pairwise_clip_loss_grad(reps, scale)
                                                             : symile_loss_grad(reps, scale, strategy, perms);
  BatchLossGrad out{lg.loss, lg.per_term, params.zeros_like()};
  for (std::size_t m = 0; m < inputs.size(); ++m) {
    encode_backward(params.encoders[m], inputs[m], fwd[m], lg.d_reps[m], out.grad.encoders[m]);
  }
  // d/dt exp(t) = exp(t)
  out.grad.log_temperature = lg.d_scale * scale;
  return out;
}

}  // namespace symile

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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symile/linalg.hpp"

namespace symile {

/// r = W x + b, optionally projected to the unit sphere.
struct AffineEncoder {
  Matrix weight;             // D_out x D_in
  std::vector<double> bias;  // D_out
  bool normalize = true;

  [[nodiscard]] std::size_t in_dim() const noexcept { return weight.cols(); }
  [[nodiscard]] std::size_t out_dim() const noexcept { return weight.rows(); }

  /// Throws InvalidArgument on a length mismatch and NumericalError when
  /// normalizing a zero pre-activation.
  [[nodiscard]] std::vector<double> forward(std::span<const double> x) const;

  friend bool operator==(const AffineEncoder&, const AffineEncoder&) = default;
};

/// Batch forward pass with the intermediates backward needs.
struct EncodedBatch {
  Matrix pre;                 // W x + b per row
  Matrix out;                 // normalized rows (or pre when not normalizing)
  std::vector<double> norms;  // ||pre|| per row, only when normalizing
};

EncodedBatch encode(const AffineEncoder& e, const Matrix& x);

/// Accumulates dL/dW and dL/db of one encoder into `grad` given dL/d(out).
void encode_backward(const AffineEncoder& e, const Matrix& x, const EncodedBatch& fwd, const Matrix& d_out,
                     AffineEncoder& grad);

/// One encoder per modality plus the log-temperature t (logit multiplier exp(t)).
struct ModelParams {
  std::vector<AffineEncoder> encoders;
  double log_temperature = 0.0;

  [[nodiscard]] double scale() const noexcept { return std::exp(log_temperature); }
  [[nodiscard]] std::size_t num_params() const noexcept;
  [[nodiscard]] std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  /// 1 for parameters subject to weight decay, 0 for the temperature.
  [[nodiscard]] std::vector<std::uint8_t> decay_mask() const;
  /// ("enc0.weight", length), ("enc0.bias", length), ..., ("log_temperature", 1).
  [[nodiscard]] std::vector<std::pair<std::string, std::size_t>> blocks() const;
  [[nodiscard]] ModelParams zeros_like() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Weights and biases iid uniform on +-1/sqrt(D_in).
ModelParams init_model(const std::vector<std::size_t>& in_dims, std::size_t d_out, bool normalize,
                       double log_temperature, std::uint64_t seed);

struct CrossEntropy {
  double loss;                // nats
  std::vector<double> grad;   // softmax - one_hot(target)
};

/// -log softmax(logits)[target], max-subtracted.
CrossEntropy softmax_cross_entropy(std::span<const double> logits, std::size_t target);
/// Loss part of softmax_cross_entropy without allocating the gradient.
double softmax_cross_entropy_loss(std::span<const double> logits, std::size_t target);

double logsumexp(std::span<const double> v);

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;

  friend bool operator==(const AdamWConfig&, const AdamWConfig&) = default;
};

struct OptimizerState {
  AdamWConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  OptimizerState() = default;
  OptimizerState(AdamWConfig cfg, std::size_t n) : config(cfg), m(n, 0.0), v(n, 0.0) {}

  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

/// Adam with decoupled weight decay and bias correction. Parameters whose
/// decay_mask entry is 0 skip the decay term; an empty mask decays all.
void adamw_step(OptimizerState& s, std::span<double> params, std::span<const double> grads,
                std::span<const std::uint8_t> decay_mask = {});

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps).
std::vector<double> finite_diff_grad(const ScalarFn& f, std::span<const double> params, double eps);

struct GradCheckReport {
  std::vector<std::pair<std::string, double>> max_rel_error_per_block;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Relative error |a - n| / max(|a|, |n|, 1e-8), reduced per block.
GradCheckReport compare_gradients(std::span<const double> analytic, std::span<const double> numeric,
                                  const std::vector<std::pair<std::string, std::size_t>>& blocks,
                                  double tolerance);

}  // namespace symile

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

#include "symile/numcore.hpp"

#include <algorithm>
#include <limits>

#include "symile/error.hpp"
#include "symile/rng.hpp"

namespace symile {

std::vector<double> AffineEncoder::forward(std::span<const double> x) const {
  if (x.size() != in_dim()) throw InvalidArgument("AffineEncoder::forward: input has wrong dimension");
  std::vector<double> r(bias);
  for (std::size_t o = 0; o < out_dim(); ++o) r[o] += dot(weight.row(o), x);
  if (normalize) {
    const double n = norm2(r);
    if (n == 0.0) throw NumericalError("AffineEncoder::forward: zero pre-activation cannot be normalized");
    for (double& v : r) v /= n;
  }
  return r;
}

EncodedBatch encode(const AffineEncoder& e, const Matrix& x) {
  if (x.cols() != e.in_dim()) throw InvalidArgument("encode: input has wrong dimension");
  EncodedBatch out;
  out.pre = matmul_nt(x, e.weight);
  for (std::size_t i = 0; i < out.pre.rows(); ++i) axpy(1.0, e.bias, out.pre.row(i));
  if (!e.normalize) {
    out.out = out.pre;
    return out;
  }
  out.out = Matrix(out.pre.rows(), out.pre.cols());
  out.norms.resize(out.pre.rows());
  for (std::size_t i = 0; i < out.pre.rows(); ++i) {
    const double n = norm2(out.pre.row(i));
    if (n == 0.0) throw NumericalError("encode: zero pre-activation cannot be normalized");
    out.norms[i] = n;
    auto src = out.pre.row(i);
    auto dst = out.out.row(i);
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] / n;
  }
  return out;
}

void encode_backward(const AffineEncoder& e, const Matrix& x, const EncodedBatch& fwd, const Matrix& d_out,
                     AffineEncoder& grad) {
  Matrix d_pre = d_out;
  if (e.normalize) {
    // d z = (I - r r^T) d r / ||z||
    for (std::size_t i = 0; i < d_pre.rows(); ++i) {
      auto r = fwd.out.row(i);
      auto g = d_pre.row(i);
      const double proj = dot(r, g);
      for (std::size_t k = 0; k < g.size(); ++k) g[k] = (g[k] - r[k] * proj) / fwd.norms[i];
    }
  }
  const Matrix dw = matmul_tn(d_pre, x);
  axpy(1.0, dw.flat(), grad.weight.flat());
  for (std::size_t i = 0; i < d_pre.rows(); ++i) axpy(1.0, d_pre.row(i), grad.bias);
}

std::size_t ModelParams::num_params() const noexcept {
  std::size_t n = 1;
  for (const auto& e : encoders) n += e.weight.size() + e.bias.size();
  return n;
}

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(num_params());
  for (const auto& e : encoders) {
    flat.insert(flat.end(), e.weight.flat().begin(), e.weight.flat().end());
    flat.insert(flat.end(), e.bias.begin(), e.bias.end());
  }
  flat.push_back(log_temperature);
  return flat;
}

void ModelParams::assign(std::span<const double> flat) {
  if (flat.size() != num_params()) throw InvalidArgument("ModelParams::assign: wrong parameter count");
  std::size_t k = 0;
  for (auto& e : encoders) {
    for (double& w : e.weight.flat()) w = flat[k++];
    for (double& b : e.bias) b = flat[k++];
  }
  log_temperature = flat[k];
}

std::vector<std::uint8_t> ModelParams::decay_mask() const {
  std::vector<std::uint8_t> mask(num_params(), 1);
  mask.back() = 0;
  return mask;
}

std::vector<std::pair<std::string, std::size_t>> ModelParams::blocks() const {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (std::size_t m = 0; m < encoders.size(); ++m) {
    out.emplace_back("enc" + std::to_string(m) + ".weight", encoders[m].weight.size());
    out.emplace_back("enc" + std::to_string(m) + ".bias", encoders[m].bias.size());
  }
  out.emplace_back("log_temperature", 1);
  return out;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  for (const auto& e : encoders) {
    z.encoders.push_back(AffineEncoder{Matrix(e.weight.rows(), e.weight.cols()),
                                       std::vector<double>(e.bias.size(), 0.0), e.normalize});
  }
  z.log_temperature = 0.0;
  return z;
}

ModelParams init_model(const std::vector<std::size_t>& in_dims, std::size_t d_out, bool normalize,
                       double log_temperature, std::uint64_t seed) {
  if (d_out < 1) throw InvalidArgument("init_model: D_out must be >= 1");
  ModelParams p;
  p.log_temperature = log_temperature;
  Rng root = Rng(seed).substream("init");
  for (std::size_t m = 0; m < in_dims.size(); ++m) {
    if (in_dims[m] < 1) throw InvalidArgument("init_model: D_in must be >= 1");
    Rng rng = root.substream(m);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dims[m]));
    AffineEncoder e{Matrix(d_out, in_dims[m]), std::vector<double>(d_out, 0.0), normalize};
    for (double& w : e.weight.flat()) w = (2.0 * rng.uniform() - 1.0) * bound;
    // Nonzero biases keep all-zero inputs off the normalization singularity.
    for (double& b : e.bias) b = (2.0 * rng.uniform() - 1.0) * bound;
    p.encoders.push_back(std::move(e));
  }
  return p;
}

double logsumexp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double softmax_cross_entropy_loss(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) throw InvalidArgument("softmax_cross_entropy: target out of range");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : logits) {
    if (!std::isfinite(x)) throw NumericalError("softmax_cross_entropy: non-finite logit");
    m = std::max(m, x);
  }
  double s = 0.0;
  for (double x : logits) s += std::exp(x - m);
  return std::log(s) - (logits[target] - m);
}

CrossEntropy softmax_cross_entropy(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) throw InvalidArgument("softmax_cross_entropy: target out of range");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : logits) {
    if (!std::isfinite(x)) throw NumericalError("softmax_cross_entropy: non-finite logit");
    m = std::max(m, x);
  }
  CrossEntropy out{0.0, std::vector<double>(logits.size())};
  double s = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out.grad[k] = std::exp(logits[k] - m);
    s += out.grad[k];
  }
  out.loss = std::log(s) - (logits[target] - m);
  const double inv = 1.0 / s;
  for (double& g : out.grad) g *= inv;
  out.grad[target] -= 1.0;
  return out;
}

void adamw_step(OptimizerState& s, std::span<double> params, std::span<const double> grads,
                std::span<const std::uint8_t> decay_mask) {
  if (grads.size() != params.size() || s.m.size() != params.size() || s.v.size() != params.size()) {
    throw InvalidArgument("adamw_step: parameter, gradient and moment shapes differ");
  }
  if (!decay_mask.empty() && decay_mask.size() != params.size()) {
    throw InvalidArgument("adamw_step: decay mask has the wrong length");
  }
  const AdamWConfig& c = s.config;
  s.step += 1;
  const double t = static_cast<double>(s.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (c.weight_decay != 0.0 && (decay_mask.empty() || decay_mask[i] != 0)) {
      params[i] -= c.lr * c.weight_decay * params[i];
    }
    s.m[i] = c.beta1 * s.m[i] + (1.0 - c.beta1) * grads[i];
    s.v[i] = c.beta2 * s.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double m_hat = s.m[i] / bc1;
    const double v_hat = s.v[i] / bc2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

std::vector<double> finite_diff_grad(const ScalarFn& f, std::span<const double> params, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("finite_diff_grad: eps must be positive");
  std::vector<double> x(params.begin(), params.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + eps;
    const double fp = f(x);
    x[i] = orig - eps;
    const double fm = f(x);
    x[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw NumericalError("finite_diff_grad: non-finite loss");
    g[i] = (fp - fm) / (2.0 * eps);
  }
  return g;
}

GradCheckReport compare_gradients(std::span<const double> analytic, std::span<const double> numeric,
                                  const std::vector<std::pair<std::string, std::size_t>>& blocks,
                                  double tolerance) {
  if (analytic.size() != numeric.size()) throw InvalidArgument("compare_gradients: length mismatch");
  GradCheckReport r;
  r.tolerance = tolerance;
  auto rel = [&](std::size_t i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-8});
    return std::abs(analytic[i] - numeric[i]) / denom;
  };
  std::size_t k = 0;
  for (const auto& [name, len] : blocks) {
    double worst = 0.0;
    for (std::size_t i = 0; i < len && k < analytic.size(); ++i, ++k) worst = std::max(worst, rel(k));
    r.max_rel_error_per_block.emplace_back(name, worst);
    r.max_rel_error = std::max(r.max_rel_error, worst);
  }
  for (; k < analytic.size(); ++k) r.max_rel_error = std::max(r.max_rel_error, rel(k));
  r.pass = r.max_rel_error < tolerance;
  return r;
}

}  // namespace symile

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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "symile/error.hpp"
#include "symile/numcore.hpp"
#include "symile/rng.hpp"

namespace symile {
namespace {

TEST(AffineEncoderTest, ForwardExamples) {
  AffineEncoder id{Matrix::identity(3), {0.0, 0.0, 0.0}, false};
  const std::vector<double> x = {0.5, -2.0, 3.0};
  EXPECT_EQ(id.forward(x), x);

  AffineEncoder bias_only{Matrix(2, 3), {3.0, 4.0}, true};
  const auto r = bias_only.forward(x);
  EXPECT_NEAR(r[0], 0.6, 1e-15);
  EXPECT_NEAR(r[1], 0.8, 1e-15);

  AffineEncoder zero{Matrix(2, 3), {0.0, 0.0}, true};
  EXPECT_THROW((void)zero.forward(x), NumericalError);
  EXPECT_THROW((void)id.forward(std::vector<double>{1.0}), InvalidArgument);
}

TEST(AffineEncoderTest, NormalizedOutputsHaveUnitNorm) {
  const ModelParams p = init_model({5, 5, 5}, 16, true, -0.3, 9);
  Rng rng(1);
  Matrix x(50, 5);
  for (double& v : x.flat()) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  for (const auto& e : p.encoders) {
    const EncodedBatch b = encode(e, x);
    for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_LT(std::abs(norm2(b.out.row(i)) - 1.0), 1e-9);
  }
}

TEST(InitTest, ShapesRangeAndDeterminism) {
  const ModelParams p = init_model({4, 2}, 6, true, -0.3, 3);
  ASSERT_EQ(p.encoders.size(), 2u);
  EXPECT_EQ(p.log_temperature, -0.3);
  EXPECT_EQ(p.encoders[0].weight.rows(), 6u);
  EXPECT_EQ(p.encoders[0].weight.cols(), 4u);
  for (double w : p.encoders[0].weight.flat()) EXPECT_LE(std::abs(w), 0.5);
  for (double w : p.encoders[1].weight.flat()) EXPECT_LE(std::abs(w), 1.0 / std::sqrt(2.0));
  EXPECT_EQ(p, init_model({4, 2}, 6, true, -0.3, 3));
  EXPECT_FALSE(p == init_model({4, 2}, 6, true, -0.3, 4));
  EXPECT_EQ(p.num_params(), 6u * 4 + 6 + 6 * 2 + 6 + 1);
  const auto mask = p.decay_mask();
  EXPECT_EQ(mask.back(), 0);
  EXPECT_EQ(mask.front(), 1);
  ModelParams q = p.zeros_like();
  q.assign(p.flatten());
  EXPECT_EQ(q, p);
}

TEST(SoftmaxCrossEntropyTest, Examples) {
  const std::vector<double> uniform(7, 0.3);
  EXPECT_NEAR(softmax_cross_entropy(uniform, 2).loss, std::log(7.0), 1e-15);
  const std::vector<double> big = {1000.0, 0.0};
  const auto ce = softmax_cross_entropy(big, 0);
  EXPECT_TRUE(std::isfinite(ce.loss));
  EXPECT_NEAR(ce.loss, 0.0, 1e-300);
  const std::vector<double> zeros = {0.0, 0.0};
  const auto g = softmax_cross_entropy(zeros, 0).grad;
  EXPECT_DOUBLE_EQ(g[0], -0.5);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  const std::vector<double> bad = {0.0, NAN};
  EXPECT_THROW(softmax_cross_entropy(bad, 0), NumericalError);
  EXPECT_THROW(softmax_cross_entropy(zeros, 2), InvalidArgument);
}

TEST(SoftmaxCrossEntropyTest, ShiftInvarianceAndLossAgreement) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(9);
    for (double& v : x) v = 10.0 * rng.uniform() - 5.0;
    const auto target = rng.below(9);
    const double base = softmax_cross_entropy(x, target).loss;
    EXPECT_EQ(base, softmax_cross_entropy_loss(x, target));
    std::vector<double> shifted = x;
    for (double& v : shifted) v += 123.4;
    EXPECT_NEAR(softmax_cross_entropy(shifted, target).loss, base, 1e-10);
    const auto g = softmax_cross_entropy(x, target).grad;
    double s = 0.0;
    for (double v : g) s += v;
    EXPECT_NEAR(s, 0.0, 1e-14);
  }
}

TEST(AdamWTest, ZeroGradients) {
  std::vector<double> p = {1.0, -2.0};
  const std::vector<double> g = {0.0, 0.0};
  OptimizerState s(AdamWConfig{0.1, 0.9, 0.999, 1e-8, 0.0}, 2);
  adamw_step(s, p, g);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0}));

  OptimizerState d(AdamWConfig{0.1, 0.9, 0.999, 1e-8, 0.01}, 2);
  adamw_step(d, p, g);
  EXPECT_DOUBLE_EQ(p[0], 1.0 * (1.0 - 0.1 * 0.01));
  EXPECT_DOUBLE_EQ(p[1], -2.0 * (1.0 - 0.1 * 0.01));
}

TEST(AdamWTest, MatchesScalarHandComputation) {
  const double lr = 0.1;
  const double wd = 0.01;
  const double b1 = 0.9;
  const double b2 = 0.999;
  const double eps = 1e-8;
  std::vector<double> p = {1.5, -0.7, 0.2};
  const std::vector<std::uint8_t> mask = {1, 1, 0};
  OptimizerState s(AdamWConfig{lr, b1, b2, eps, wd}, 3);
  long double theta[3] = {1.5L, -0.7L, 0.2L};
  long double m[3] = {};
  long double v[3] = {};
  const double grads[3][3] = {{0.3, -0.2, 1.0}, {0.3, 0.4, -2.0}, {-0.1, 0.0, 0.5}};
  for (int t = 1; t <= 3; ++t) {
    adamw_step(s, p, grads[t - 1], mask);
    for (int k = 0; k < 3; ++k) {
      if (mask[k]) theta[k] -= lr * wd * theta[k];
      m[k] = b1 * m[k] + (1 - b1) * grads[t - 1][k];
      v[k] = b2 * v[k] + (1 - b2) * grads[t - 1][k] * grads[t - 1][k];
      const long double mh = m[k] / (1 - std::pow(static_cast<long double>(b1), t));
      const long double vh = v[k] / (1 - std::pow(static_cast<long double>(b2), t));
      theta[k] -= lr * mh / (std::sqrt(vh) + eps);
      EXPECT_NEAR(p[k], static_cast<double>(theta[k]), 1e-14) << "step " << t << " param " << k;
    }
  }
  EXPECT_EQ(s.step, 3u);
}

TEST(AdamWTest, FirstStepMovesByLearningRate) {
  std::vector<double> p = {0.0, 0.0};
  const std::vector<double> g = {2.5, -0.01};
  OptimizerState s(AdamWConfig{0.05, 0.9, 0.999, 1e-8, 0.0}, 2);
  adamw_step(s, p, g);
  EXPECT_NEAR(p[0], -0.05 * 2.5 / (2.5 + 1e-8), 1e-16);
  EXPECT_NEAR(p[1], 0.05 * 0.01 / (0.01 + 1e-8), 1e-16);
}

TEST(AdamWTest, ShapeMismatch) {
  std::vector<double> p = {1.0};
  const std::vector<double> g = {1.0, 2.0};
  OptimizerState s(AdamWConfig{}, 1);
  EXPECT_THROW(adamw_step(s, p, g), InvalidArgument);
}

TEST(FiniteDiffTest, Examples) {
  const std::vector<double> three = {3.0};
  const auto sq = finite_diff_grad([](std::span<const double> x) { return x[0] * x[0]; }, three, 1e-4);
  EXPECT_NEAR(sq[0], 6.0, 1e-6);
  const std::vector<double> x = {1.0, -2.0, 0.5};
  for (double v : finite_diff_grad([](std::span<const double>) { return 4.2; }, x, 1e-5)) EXPECT_EQ(v, 0.0);
  const auto lin = finite_diff_grad(
      [](std::span<const double> y) {
        double s = 0.0;
        for (double v : y) s += v;
        return s;
      },
      x, 1e-5);
  for (double v : lin) EXPECT_NEAR(v, 1.0, 1e-9);
  EXPECT_THROW(finite_diff_grad([](std::span<const double>) { return NAN; }, x, 1e-5), NumericalError);
  EXPECT_THROW(finite_diff_grad([](std::span<const double>) { return 0.0; }, x, 0.0), InvalidArgument);
}

TEST(CompareGradientsTest, RelativeErrorAndPass) {
  const std::vector<double> a = {1.0, 2.0, 0.0};
  const std::vector<double> n = {1.0, 2.0002, 1e-12};
  const auto r = compare_gradients(a, n, {{"w", 2}, {"t", 1}}, 1e-3);
  ASSERT_EQ(r.max_rel_error_per_block.size(), 2u);
  EXPECT_NEAR(r.max_rel_error_per_block[0].second, 0.0002 / 2.0002, 1e-12);
  EXPECT_NEAR(r.max_rel_error_per_block[1].second, 1e-12 / 1e-8, 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(compare_gradients(a, n, {{"all", 3}}, 1e-5).pass);
}

TEST(EncodeBackwardTest, MatchesFiniteDifferences) {
  Rng rng(12);
  for (bool normalize : {false, true}) {
    ModelParams p = init_model({3}, 4, normalize, 0.0, 5);
    Matrix x(6, 3);
    for (double& v : x.flat()) v = 2.0 * rng.uniform() - 1.0;
    Matrix weights(6, 4);
    for (double& v : weights.flat()) v = 2.0 * rng.uniform() - 1.0;
    auto f = [&](std::span<const double> flat) {
      ModelParams q = p;
      q.assign(flat);
      const Matrix out = encode(q.encoders[0], x).out;
      double s = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) s += out.flat()[i] * weights.flat()[i];
      return s;
    };
    const auto numeric = finite_diff_grad(f, p.flatten(), 1e-6);
    ModelParams grad = p.zeros_like();
    encode_backward(p.encoders[0], x, encode(p.encoders[0], x), weights, grad.encoders[0]);
    const auto report = compare_gradients(grad.flatten(), numeric, p.blocks(), 1e-6);
    EXPECT_TRUE(report.pass) << "normalize=" << normalize << " err=" << report.max_rel_error;
  }
}

}  // namespace
}  // namespace symile

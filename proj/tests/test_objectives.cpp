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

#include <gtest/gtest.h>

#include "oracle/reference.hpp"
#include "symile/error.hpp"
#include "symile/objectives.hpp"
#include "symile/rng.hpp"

namespace symile {
namespace {

Matrix random_reps(std::size_t n, std::size_t d, Rng& rng, bool unit) {
  Matrix m(n, d);
  for (double& v : m.flat()) v = 2.0 * rng.uniform() - 1.0;
  if (unit) {
    for (std::size_t i = 0; i < n; ++i) {
      const double norm = norm2(m.row(i));
      for (double& v : m.row(i)) v /= norm;
    }
  }
  return m;
}

std::vector<Matrix> random_set(std::size_t m, std::size_t n, std::size_t d, Rng& rng) {
  std::vector<Matrix> reps;
  for (std::size_t k = 0; k < m; ++k) reps.push_back(random_reps(n, d, rng, true));
  return reps;
}

TEST(MipTest, Examples) {
  const std::vector<double> a = {1, 2};
  const std::vector<double> b = {3, 4};
  const std::vector<double> c = {5, 6};
  const std::vector<double> z = {0, 0};
  EXPECT_EQ(mip({a, b, c}), 63.0);
  EXPECT_EQ(mip({a, b}), dot(a, b));
  EXPECT_EQ(mip({a, z, c}), 0.0);
  const std::vector<double> short_v = {1};
  EXPECT_THROW(mip({a, short_v}), InvalidArgument);
  EXPECT_THROW(mip({a}), InvalidArgument);
}

TEST(MipTest, MultilinearAndSymmetric) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(6), y(6), w(6);
    for (std::size_t k = 0; k < 6; ++k) {
      x[k] = rng.uniform() - 0.5;
      y[k] = rng.uniform() - 0.5;
      w[k] = rng.uniform() - 0.5;
    }
    std::vector<double> x2 = x;
    for (double& v : x2) v *= 4.0;
    EXPECT_EQ(mip({x2, y, w}), 4.0 * mip({x, y, w}));
    EXPECT_EQ(mip({x, y}), mip({y, x}));
    EXPECT_NEAR(mip({x, y, w}), mip({w, x, y}), 1e-16);
    EXPECT_NEAR(mip({x, y, w}), mip({y, w, x}), 1e-16);
  }
}

TEST(ClipLossTest, Examples) {
  const Matrix one = Matrix::from_rows({{0.6, 0.8}});
  EXPECT_EQ(clip_pair_loss(one, one, 2.0), 0.0);
  const Matrix same = Matrix::from_rows({{1, 0}, {1, 0}, {1, 0}, {1, 0}});
  EXPECT_NEAR(clip_pair_loss(same, same, 3.0), std::log(4.0), 1e-15);
  const Matrix eye = Matrix::identity(2);
  EXPECT_NEAR(clip_pair_loss(eye, eye, 1.0), -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0)), 1e-15);
  EXPECT_NEAR(clip_pair_loss(eye, eye, 1.0), 0.31326168751822286, 1e-15);
  EXPECT_THROW(clip_pair_loss(Matrix(0, 2), Matrix(0, 2), 1.0), InvalidArgument);
}

TEST(ClipLossTest, MatchesReference) {
  Rng rng(8);
  for (std::size_t n : {2u, 5u, 9u}) {
    const Matrix x = random_reps(n, 4, rng, true);
    const Matrix y = random_reps(n, 4, rng, true);
    EXPECT_NEAR(clip_pair_loss(x, y, 2.7), static_cast<double>(ref::clip_pair(x, y, 2.7)), 1e-13);
    const LossGrad g = clip_pair_loss_grad(x, y, 2.7);
    EXPECT_EQ(g.loss, clip_pair_loss(x, y, 2.7));
    EXPECT_NEAR(g.per_term[0], static_cast<double>(ref::clip_direction(x, y, 2.7)), 1e-13);
    EXPECT_NEAR(g.per_term[1], static_cast<double>(ref::clip_direction(y, x, 2.7)), 1e-13);
  }
}

TEST(PairwiseClipTest, SumsPairs) {
  Rng rng(2);
  const auto reps = random_set(3, 6, 5, rng);
  const double sum = clip_pair_loss(reps[0], reps[1], 1.3) + clip_pair_loss(reps[0], reps[2], 1.3) +
                     clip_pair_loss(reps[1], reps[2], 1.3);
  EXPECT_NEAR(pairwise_clip_loss(reps, 1.3), sum, 1e-14);
  const std::vector<Matrix> two = {reps[0], reps[1]};
  EXPECT_EQ(pairwise_clip_loss(two, 1.3), clip_pair_loss(reps[0], reps[1], 1.3));
  const Matrix same = Matrix::from_rows({{1, 0}, {1, 0}, {1, 0}});
  EXPECT_NEAR(pairwise_clip_loss({same, same, same}, 0.5), 3.0 * std::log(3.0), 1e-14);
}

TEST(LogitsOnTest, HandExpansion) {
  const std::vector<Matrix> reps = {Matrix::from_rows({{1, 2}, {3, 4}}), Matrix::from_rows({{1, 0}, {0, 1}}),
                                    Matrix::from_rows({{2, 1}, {1, 2}})};
  const std::vector<std::vector<std::size_t>> perms = {{}, {1, 0}, {1, 0}};
  const LogitsMatrix lm = build_logits_on(0, reps, perms, 1.0);
  EXPECT_EQ(lm.logits, Matrix::from_rows({{2, 2}, {8, 8}}));
  EXPECT_EQ(lm.targets, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(mean_row_cross_entropy(lm), std::log(2.0), 1e-15);

  const LogitsMatrix scaled = build_logits_on(0, reps, perms, 0.5);
  EXPECT_EQ(scaled.logits, Matrix::from_rows({{1, 1}, {4, 4}}));

  // Anchor z, identity permutations: every column is a matched tuple.
  const LogitsMatrix id = build_logits_on(2, reps, {{0, 1}, {0, 1}, {}}, 1.0);
  EXPECT_EQ(id.logits, Matrix::from_rows({{2, 4}, {1, 8}}));
}

TEST(LogitsOnTest, DiagonalIsPositiveTuple) {
  Rng rng(6);
  const auto reps = random_set(4, 7, 3, rng);
  Rng prng(1);
  const auto perms = draw_permutations(4, 7, prng);
  for (std::size_t a = 0; a < 4; ++a) {
    const LogitsMatrix lm = build_logits_on(a, reps, perms[a], 1.5);
    for (std::size_t i = 0; i < 7; ++i) {
      std::vector<std::span<const double>> rows;
      for (const auto& r : reps) rows.push_back(r.row(i));
      EXPECT_NEAR(lm.logits(i, i), 1.5 * mip(rows), 1e-15);
    }
  }
  EXPECT_THROW(build_logits_on(0, reps, {{}, {0, 0, 1, 2, 3, 4, 5}, {}, {}}, 1.0), InvalidArgument);
}

TEST(LogitsOn2Test, BruteForceEnumeration) {
  Rng rng(10);
  const auto reps = random_set(3, 2, 3, rng);
  for (std::size_t a = 0; a < 3; ++a) {
    const LogitsMatrix lm = build_logits_on2(a, reps, 1.0);
    ASSERT_EQ(lm.logits.rows(), 2u);
    ASSERT_EQ(lm.logits.cols(), 4u);
    const std::size_t y = a == 0 ? 1 : 0;
    const std::size_t z = a == 2 ? 1 : 2;
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(lm.targets[i], i * 2 + i);
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) {
          EXPECT_NEAR(lm.logits(i, j * 2 + k), mip({reps[a].row(i), reps[y].row(j), reps[z].row(k)}), 1e-15);
        }
      }
    }
  }
  const std::vector<Matrix> single = {Matrix::from_rows({{1, 0}}), Matrix::from_rows({{0, 1}}),
                                      Matrix::from_rows({{1, 1}})};
  const LogitsMatrix lm1 = build_logits_on2(0, single, 1.0);
  EXPECT_EQ(lm1.logits.cols(), 1u);
  EXPECT_EQ(mean_row_cross_entropy(lm1), 0.0);
  EXPECT_THROW(build_logits_on2(0, random_set(4, 2, 3, rng), 1.0), InvalidArgument);
  EXPECT_THROW(build_logits_on2(0, random_set(2, 2, 3, rng), 1.0), InvalidArgument);
}

TEST(SymileLossTest, MatchesReference) {
  Rng rng(12);
  for (std::size_t m : {2u, 3u, 4u}) {
    for (std::size_t n : {1u, 2u, 6u}) {
      const auto reps = random_set(m, n, 5, rng);
      Rng prng(n * 10 + m);
      const auto perms = draw_permutations(m, n, prng);
      const SymileLoss l = symile_loss(reps, 2.2, NegativeStrategy::on_permute, perms);
      EXPECT_NEAR(l.loss, static_cast<double>(ref::symile_permuted(reps, 2.2, perms)), 1e-13);
      ASSERT_EQ(l.per_anchor.size(), m);
      double mean = 0.0;
      for (double v : l.per_anchor) mean += v / static_cast<double>(m);
      EXPECT_NEAR(l.loss, mean, 1e-15);
      EXPECT_GE(l.loss, 0.0);
      if (m == 3) {
        const SymileLoss l2 = symile_loss(reps, 2.2, NegativeStrategy::on_squared, perms);
        EXPECT_NEAR(l2.loss, static_cast<double>(ref::symile_all_pairs(reps, 2.2)), 1e-13);
      }
    }
  }
}

TEST(SymileLossTest, UniformLogits) {
  const Matrix same = Matrix::from_rows({{0.6, 0.8}, {0.6, 0.8}, {0.6, 0.8}, {0.6, 0.8}});
  const std::vector<Matrix> reps = {same, same, same};
  Rng rng(1);
  EXPECT_NEAR(symile_loss(reps, 1.7, NegativeStrategy::on_permute, rng).loss, std::log(4.0), 1e-14);
  EXPECT_NEAR(symile_loss(reps, 1.7, NegativeStrategy::on_squared, rng).loss, std::log(16.0), 1e-14);
}

TEST(SymileLossTest, TwoModalitiesReduceToClipDirections) {
  Rng rng(14);
  for (std::size_t n : {1u, 2u, 7u, 16u}) {
    const auto reps = random_set(2, n, 8, rng);
    const SymileLoss s = symile_loss(reps, 3.1, NegativeStrategy::on_permute, identity_permutations(2, n));
    const LossGrad c = clip_pair_loss_grad(reps[0], reps[1], 3.1);
    EXPECT_EQ(s.per_anchor[0], c.per_term[0]) << n;
    EXPECT_EQ(s.per_anchor[1], c.per_term[1]) << n;
    EXPECT_EQ(s.loss, c.loss) << n;
  }
}

TEST(SymileLossTest, StrictlyDecreasesWhenPositiveGrows) {
  Rng rng(16);
  const auto reps = random_set(3, 5, 4, rng);
  const auto perms = identity_permutations(3, 5);
  LogitsMatrix lm = build_logits_on(0, reps, perms[0], 1.0);
  double prev = mean_row_cross_entropy(lm);
  for (int step = 0; step < 5; ++step) {
    lm.logits(2, 2) += 0.5;
    const double next = mean_row_cross_entropy(lm);
    EXPECT_LT(next, prev);
    EXPECT_GT(next, 0.0);
    prev = next;
  }
}

TEST(SymileLossTest, AnchorRelabelingPermutesBreakdown) {
  Rng rng(18);
  const std::size_t n = 6;
  const auto reps = random_set(3, n, 5, rng);
  Rng prng(3);
  const auto perms = draw_permutations(3, n, prng);
  const SymileLoss base = symile_loss(reps, 1.9, NegativeStrategy::on_permute, perms);

  // Relabel modalities by sigma: new index k holds old modality sigma[k].
  const std::size_t sigma[3] = {2, 0, 1};
  std::vector<Matrix> relabeled;
  for (std::size_t k = 0; k < 3; ++k) relabeled.push_back(reps[sigma[k]]);
  AnchorPermutations moved(3, std::vector<std::vector<std::size_t>>(3));
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t m = 0; m < 3; ++m) moved[a][m] = perms[sigma[a]][sigma[m]];
  }
  const SymileLoss other = symile_loss(relabeled, 1.9, NegativeStrategy::on_permute, moved);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(other.per_anchor[k], base.per_anchor[sigma[k]], 1e-12);
  EXPECT_NEAR(other.loss, base.loss, 1e-12);

  const std::vector<Matrix> two = {reps[0], reps[1]};
  const std::vector<Matrix> swapped = {reps[1], reps[0]};
  const auto p2 = draw_permutations(2, n, prng);
  const AnchorPermutations p2_swapped = {{{}, p2[1][0]}, {p2[0][1], {}}};
  const SymileLoss l = symile_loss(two, 1.9, NegativeStrategy::on_permute, p2);
  const SymileLoss r = symile_loss(swapped, 1.9, NegativeStrategy::on_permute, p2_swapped);
  EXPECT_EQ(l.per_anchor[0], r.per_anchor[1]);
  EXPECT_EQ(l.per_anchor[1], r.per_anchor[0]);
}

TEST(SymileLossTest, GradientLossMatchesLoss) {
  Rng rng(20);
  const auto reps = random_set(3, 5, 4, rng);
  Rng prng(7);
  const auto perms = draw_permutations(3, 5, prng);
  for (auto strategy : {NegativeStrategy::on_permute, NegativeStrategy::on_squared}) {
    const LossGrad g = symile_loss_grad(reps, 1.4, strategy, perms);
    const SymileLoss l = symile_loss(reps, 1.4, strategy, perms);
    EXPECT_EQ(g.loss, l.loss);
    EXPECT_EQ(g.per_term, l.per_anchor);
    ASSERT_EQ(g.d_reps.size(), 3u);
  }
}

TEST(PermutationTest, FreshPerAnchorAndDeterministic) {
  Rng a(5);
  Rng b(5);
  const auto p = draw_permutations(3, 50, a);
  EXPECT_EQ(p, draw_permutations(3, 50, b));
  EXPECT_TRUE(p[0][0].empty());
  EXPECT_NE(p[0][1], p[2][1]);
  EXPECT_NE(p, draw_permutations(3, 50, a));
  EXPECT_EQ(identity_permutations(2, 3)[0][1], (std::vector<std::size_t>{0, 1, 2}));
}

TEST(StrategyTest, Names) {
  EXPECT_EQ(to_string(NegativeStrategy::on_permute), "on");
  EXPECT_EQ(to_string(NegativeStrategy::on_squared), "on2");
  EXPECT_EQ(parse_strategy("on2"), NegativeStrategy::on_squared);
  EXPECT_THROW(parse_strategy("bogus"), InvalidArgument);
}

}  // namespace
}  // namespace symile

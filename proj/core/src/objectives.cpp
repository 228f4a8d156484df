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

#include "symile/objectives.hpp"

#include <string>

#include "symile/error.hpp"
#include "symile/numcore.hpp"
#include "symile/rng.hpp"

namespace symile {
namespace {

void check_reps(const std::vector<Matrix>& reps, std::size_t min_modalities, const char* what) {
  if (reps.size() < min_modalities) {
    throw InvalidArgument(std::string(what) + ": needs at least " + std::to_string(min_modalities) + " modalities");
  }
  const std::size_t n = reps.front().rows();
  const std::size_t d = reps.front().cols();
  if (n == 0) throw InvalidArgument(std::string(what) + ": empty batch");
  for (const auto& r : reps) {
    if (r.rows() != n || r.cols() != d) throw InvalidArgument(std::string(what) + ": representation shapes differ");
  }
}

std::vector<std::size_t> others_of(std::size_t anchor, std::size_t m) {
  std::vector<std::size_t> o;
  for (std::size_t k = 0; k < m; ++k) {
    if (k != anchor) o.push_back(k);
  }
  return o;
}

void check_permutation(const std::vector<std::size_t>& p, std::size_t n) {
  if (p.size() != n) throw InvalidArgument("build_logits_on: permutation has the wrong length");
  std::vector<char> seen(n, 0);
  for (auto v : p) {
    if (v >= n || seen[v] != 0) throw InvalidArgument("build_logits_on: invalid permutation");
    seen[v] = 1;
  }
}

// Unscaled O(N) scores and the non-anchor products they were built from.
struct PermuteTerms {
  std::vector<std::size_t> others;
  Matrix neg_prod;  // row j: prod over others of m[perm_m[j]]
  Matrix pos_prod;  // row i: prod over others of m[i]
  Matrix raw;       // anchor . neg_prod^T with the diagonal replaced by anchor . pos_prod
};

PermuteTerms permute_terms(std::size_t anchor, const std::vector<Matrix>& reps,
                           const std::vector<std::vector<std::size_t>>& perms) {
  check_reps(reps, 2, "build_logits_on");
  if (anchor >= reps.size()) throw InvalidArgument("build_logits_on: anchor out of range");
  if (perms.size() != reps.size()) throw InvalidArgument("build_logits_on: need one permutation slot per modality");
  const std::size_t n = reps.front().rows();
  const std::size_t d = reps.front().cols();

  PermuteTerms t;
  t.others = others_of(anchor, reps.size());
  for (auto m : t.others) check_permutation(perms[m], n);

  t.neg_prod = reps[t.others[0]].gather_rows(perms[t.others[0]]);
  t.pos_prod = reps[t.others[0]];
  for (std::size_t k = 1; k < t.others.size(); ++k) {
    const std::size_t m = t.others[k];
    for (std::size_t j = 0; j < n; ++j) {
      auto dst = t.neg_prod.row(j);
      auto src = reps[m].row(perms[m][j]);
      for (std::size_t c = 0; c < d; ++c) dst[c] *= src[c];
      auto pdst = t.pos_prod.row(j);
      auto psrc = reps[m].row(j);
      for (std::size_t c = 0; c < d; ++c) pdst[c] *= psrc[c];
    }
  }
  const Matrix& a = reps[anchor];
  t.raw = matmul_nt(a, t.neg_prod);
  for (std::size_t i = 0; i < n; ++i) t.raw(i, i) = dot(a.row(i), t.pos_prod.row(i));
  return t;
}

Matrix scaled(const Matrix& m, double scale) {
  Matrix out = m;
  for (double& v : out.flat()) v = scale * v;
  return out;
}

std::vector<std::size_t> iota_targets(std::size_t n, std::size_t stride) {
  std::vector<std::size_t> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = i * stride;
  return t;
}

Matrix raw_on_squared(std::size_t anchor, const std::vector<Matrix>& reps) {
  if (reps.size() != 3) throw InvalidArgument("build_logits_on2: the O(N^2) strategy is defined for three modalities");
  check_reps(reps, 3, "build_logits_on2");
  if (anchor >= 3) throw InvalidArgument("build_logits_on2: anchor out of range");
  const auto o = others_of(anchor, 3);
  const Matrix& a = reps[anchor];
  const Matrix& y = reps[o[0]];
  const Matrix& z = reps[o[1]];
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  Matrix raw(n, n * n);
  Matrix yz(n, d);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t c = 0; c < d; ++c) yz(k, c) = y(j, c) * z(k, c);
    }
    const Matrix block = matmul_nt(a, yz);  // n x n: rows i, cols k
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) raw(i, j * n + k) = block(i, k);
    }
  }
  return raw;
}

// Row-wise softmax-CE gradient of `logits`, scaled by `weight`; returns the summed loss.
double row_ce_grad(const Matrix& logits, const std::vector<std::size_t>& targets, double weight, Matrix& g) {
  g = Matrix(logits.rows(), logits.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto ce = softmax_cross_entropy(logits.row(i), targets[i]);
    total += ce.loss;
    auto gi = g.row(i);
    for (std::size_t k = 0; k < gi.size(); ++k) gi[k] = weight * ce.grad[k];
  }
  return total;
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  auto x = a.flat();
  auto y = b.flat();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

std::string_view to_string(NegativeStrategy s) noexcept {
  return s == NegativeStrategy::on_permute ? "on" : "on2";
}

NegativeStrategy parse_strategy(std::string_view text) {
  if (text == "on" || text == "O(N)" || text == "on_permute") return NegativeStrategy::on_permute;
  if (text == "on2" || text == "O(N^2)" || text == "on_squared") return NegativeStrategy::on_squared;
  throw InvalidArgument("unknown negative strategy '" + std::string(text) + "' (expected on|on2)");
}

double mip(std::span<const std::span<const double>> vectors) {
  if (vectors.size() < 2) throw InvalidArgument("mip: needs at least two vectors");
  const std::size_t d = vectors[0].size();
  for (const auto& v : vectors) {
    if (v.size() != d) throw InvalidArgument("mip: vectors differ in length");
  }
  double s = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double p = vectors[0][c];
    for (std::size_t m = 1; m < vectors.size(); ++m) p *= vectors[m][c];
    s += p;
  }
  return s;
}

double mip(std::initializer_list<std::span<const double>> vectors) {
  return mip(std::span<const std::span<const double>>(vectors.begin(), vectors.size()));
}

LogitsMatrix build_logits_on(std::size_t anchor, const std::vector<Matrix>& reps,
                             const std::vector<std::vector<std::size_t>>& perms, double scale) {
  const auto t = permute_terms(anchor, reps, perms);
  return LogitsMatrix{scaled(t.raw, scale), iota_targets(t.raw.rows(), 1)};
}

LogitsMatrix build_logits_on2(std::size_t anchor, const std::vector<Matrix>& reps, double scale) {
  const Matrix raw = raw_on_squared(anchor, reps);
  return LogitsMatrix{scaled(raw, scale), iota_targets(raw.rows(), raw.rows() + 1)};
}

double mean_row_cross_entropy(const LogitsMatrix& lm) {
  if (lm.logits.rows() == 0) throw InvalidArgument("mean_row_cross_entropy: no rows");
  double total = 0.0;
  for (std::size_t i = 0; i < lm.logits.rows(); ++i) {
    total += softmax_cross_entropy_loss(lm.logits.row(i), lm.targets[i]);
  }
  return total / static_cast<double>(lm.logits.rows());
}

LossGrad clip_pair_loss_grad(const Matrix& rx, const Matrix& ry, double scale) {
  check_reps({rx, ry}, 2, "clip_pair_loss");
  const std::size_t n = rx.rows();
  const Matrix raw = matmul_nt(rx, ry);
  const LogitsMatrix x_to_y{scaled(raw, scale), iota_targets(n, 1)};
  const LogitsMatrix y_to_x{transpose(x_to_y.logits), iota_targets(n, 1)};

  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix g_xy;
  Matrix g_yx;
  const double l_xy = row_ce_grad(x_to_y.logits, x_to_y.targets, 0.5 * inv_n, g_xy) / static_cast<double>(n);
  const double l_yx = row_ce_grad(y_to_x.logits, y_to_x.targets, 0.5 * inv_n, g_yx) / static_cast<double>(n);

  Matrix g = g_xy;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g(i, j) += g_yx(j, i);
  }

  LossGrad out;
  out.loss = 0.5 * (l_xy + l_yx);
  out.per_term = {l_xy, l_yx};
  out.d_scale = frobenius_dot(g, raw);
  Matrix dx = matmul(g, ry);
  Matrix dy = matmul_tn(g, rx);
  for (double& v : dx.flat()) v *= scale;
  for (double& v : dy.flat()) v *= scale;
  out.d_reps = {std::move(dx), std::move(dy)};
  return out;
}

double clip_pair_loss(const Matrix& rx, const Matrix& ry, double scale) {
  check_reps({rx, ry}, 2, "clip_pair_loss");
  const std::size_t n = rx.rows();
  const LogitsMatrix x_to_y{scaled(matmul_nt(rx, ry), scale), iota_targets(n, 1)};
  const LogitsMatrix y_to_x{transpose(x_to_y.logits), iota_targets(n, 1)};
  return 0.5 * (mean_row_cross_entropy(x_to_y) + mean_row_cross_entropy(y_to_x));
}

double pairwise_clip_loss(const std::vector<Matrix>& reps, double scale) {
  check_reps(reps, 2, "pairwise_clip_loss");
  double total = 0.0;
  for (std::size_t p = 0; p < reps.size(); ++p) {
    for (std::size_t q = p + 1; q < reps.size(); ++q) total += clip_pair_loss(reps[p], reps[q], scale);
  }
  return total;
}

LossGrad pairwise_clip_loss_grad(const std::vector<Matrix>& reps, double scale) {
  check_reps(reps, 2, "pairwise_clip_loss");
  LossGrad out;
  for (const auto& r : reps) out.d_reps.emplace_back(r.rows(), r.cols());
  for (std::size_t p = 0; p < reps.size(); ++p) {
    for (std::size_t q = p + 1; q < reps.size(); ++q) {
      const auto pair = clip_pair_loss_grad(reps[p], reps[q], scale);
      out.loss += pair.loss;
      out.per_term.push_back(pair.loss);
      out.d_scale += pair.d_scale;
      axpy(1.0, pair.d_reps[0].flat(), out.d_reps[p].flat());
      axpy(1.0, pair.d_reps[1].flat(), out.d_reps[q].flat());
    }
  }
  return out;
}

AnchorPermutations draw_permutations(std::size_t num_modalities, std::size_t n, Rng& rng) {
  const Rng call = rng.substream(rng.next_u64());
  AnchorPermutations perms(num_modalities, std::vector<std::vector<std::size_t>>(num_modalities));
  for (std::size_t a = 0; a < num_modalities; ++a) {
    Rng stream = call.substream(a);
    for (std::size_t m = 0; m < num_modalities; ++m) {
      if (m != a) perms[a][m] = stream.permutation(n);
    }
  }
  return perms;
}

AnchorPermutations identity_permutations(std::size_t num_modalities, std::size_t n) {
  std::vector<std::size_t> id(n);
  for (std::size_t i = 0; i < n; ++i) id[i] = i;
  AnchorPermutations perms(num_modalities, std::vector<std::vector<std::size_t>>(num_modalities));
  for (std::size_t a = 0; a < num_modalities; ++a) {
    for (std::size_t m = 0; m < num_modalities; ++m) {
      if (m != a) perms[a][m] = id;
    }
  }
  return perms;
}

SymileLoss symile_loss(const std::vector<Matrix>& reps, double scale, NegativeStrategy strategy, Rng& rng) {
  check_reps(reps, 2, "symile_loss");
  if (strategy == NegativeStrategy::on_squared) return symile_loss(reps, scale, strategy, AnchorPermutations{});
  return symile_loss(reps, scale, strategy, draw_permutations(reps.size(), reps.front().rows(), rng));
}

SymileLoss symile_loss(const std::vector<Matrix>& reps, double scale, NegativeStrategy strategy,
                       const AnchorPermutations& perms) {
  check_reps(reps, 2, "symile_loss");
  const std::size_t m = reps.size();
  if (strategy == NegativeStrategy::on_permute && perms.size() != m) {
    throw InvalidArgument("symile_loss: need permutations for every anchor");
  }
  SymileLoss out;
  double total = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    const LogitsMatrix lm = strategy == NegativeStrategy::on_permute ? build_logits_on(a, reps, perms[a], scale)
                                                                     : build_logits_on2(a, reps, scale);
    out.per_anchor.push_back(mean_row_cross_entropy(lm));
    total += out.per_anchor.back();
  }
  out.loss = total / static_cast<double>(m);
  return out;
}

LossGrad symile_loss_grad(const std::vector<Matrix>& reps, double scale, NegativeStrategy strategy,
                          const AnchorPermutations& perms) {
  check_reps(reps, 2, "symile_loss");
  const std::size_t m = reps.size();
  const std::size_t n = reps.front().rows();
  const std::size_t d = reps.front().cols();
  if (strategy == NegativeStrategy::on_permute && perms.size() != m) {
    throw InvalidArgument("symile_loss: need permutations for every anchor");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double weight = inv_n / static_cast<double>(m);

  LossGrad out;
  for (std::size_t k = 0; k < m; ++k) out.d_reps.emplace_back(n, d);
  double total = 0.0;

  for (std::size_t a = 0; a < m; ++a) {
    const Matrix& anchor = reps[a];
    Matrix g;
    if (strategy == NegativeStrategy::on_permute) {
      const auto t = permute_terms(a, reps, perms[a]);
      const Matrix logits = scaled(t.raw, scale);
      const double loss_a = row_ce_grad(logits, iota_targets(n, 1), weight, g) / static_cast<double>(n);
      out.per_term.push_back(loss_a);
      total += loss_a;
      out.d_scale += frobenius_dot(g, t.raw);

      std::vector<double> g_diag(n);
      for (std::size_t i = 0; i < n; ++i) {
        g_diag[i] = g(i, i);
        g(i, i) = 0.0;
      }
      // anchor
      Matrix d_anchor = matmul(g, t.neg_prod);
      for (std::size_t i = 0; i < n; ++i) axpy(g_diag[i], t.pos_prod.row(i), d_anchor.row(i));
      axpy(scale, d_anchor.flat(), out.d_reps[a].flat());
      // products of the non-anchor modalities
      Matrix d_neg = matmul_tn(g, anchor);
      Matrix d_pos(n, d);
      for (std::size_t i = 0; i < n; ++i) axpy(g_diag[i], anchor.row(i), d_pos.row(i));
      for (std::size_t k = 0; k < t.others.size(); ++k) {
        const std::size_t mk = t.others[k];
        for (std::size_t j = 0; j < n; ++j) {
          auto dst_neg = out.d_reps[mk].row(perms[a][mk][j]);
          auto dst_pos = out.d_reps[mk].row(j);
          for (std::size_t c = 0; c < d; ++c) {
            double rest_neg = scale * d_neg(j, c);
            double rest_pos = scale * d_pos(j, c);
            for (std::size_t k2 = 0; k2 < t.others.size(); ++k2) {
              if (k2 == k) continue;
              const std::size_t m2 = t.others[k2];
              rest_neg *= reps[m2](perms[a][m2][j], c);
              rest_pos *= reps[m2](j, c);
            }
            dst_neg[c] += rest_neg;
            dst_pos[c] += rest_pos;
          }
        }
      }
    } else {
      const Matrix raw = raw_on_squared(a, reps);
      const Matrix logits = scaled(raw, scale);
      const double loss_a = row_ce_grad(logits, iota_targets(n, n + 1), weight, g) / static_cast<double>(n);
      out.per_term.push_back(loss_a);
      total += loss_a;
      out.d_scale += frobenius_dot(g, raw);

      const auto o = others_of(a, 3);
      const Matrix& y = reps[o[0]];
      const Matrix& z = reps[o[1]];
      Matrix& da = out.d_reps[a];
      Matrix& dy = out.d_reps[o[0]];
      Matrix& dz = out.d_reps[o[1]];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t k = 0; k < n; ++k) {
            const double gs = scale * g(i, j * n + k);
            if (gs == 0.0) continue;
            for (std::size_t c = 0; c < d; ++c) {
              da(i, c) += gs * y(j, c) * z(k, c);
              dy(j, c) += gs * anchor(i, c) * z(k, c);
              dz(k, c) += gs * anchor(i, c) * y(j, c);
            }
          }
        }
      }
    }
  }
  out.loss = total / static_cast<double>(m);
  return out;
}

}  // namespace symile

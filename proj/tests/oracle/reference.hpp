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

// Independent reference computations used as test oracles. Everything here is
// written from the defining formulas with long double accumulation and shares
// no code with the library beyond the Matrix container.

#include <cmath>
#include <cstddef>
#include <vector>

#include "symile/linalg.hpp"

namespace ref {

using Real = long double;

/// Joint of the synthetic process over d-bit vectors (a, b, c), indexed
/// a | b << d | c << 2d, built by enumerating every (a, b, i) outcome.
struct Joint3 {
  int dims;
  std::vector<Real> p;

  [[nodiscard]] unsigned part(std::size_t s, int m) const {
    return static_cast<unsigned>((s >> (m * dims)) & ((1u << dims) - 1u));
  }
};

inline Joint3 synth_joint(double p_hat, int dims, bool shared_i) {
  const unsigned side = 1u << dims;
  Joint3 j{dims, std::vector<Real>(std::size_t{1} << (3 * dims), 0.0L)};
  const Real pa = 1.0L / static_cast<Real>(side);
  for (unsigned a = 0; a < side; ++a) {
    for (unsigned b = 0; b < side; ++b) {
      if (shared_i) {
        for (int i = 0; i < 2; ++i) {
          const unsigned c = i ? (a ^ b) : a;
          const Real pi = i ? p_hat : 1.0L - p_hat;
          j.p[a | (b << dims) | (c << (2 * dims))] += pa * pa * pi;
        }
      } else {
        for (unsigned mask = 0; mask < side; ++mask) {  // bit k set: i_k = 1
          Real pi = 1.0L;
          for (int k = 0; k < dims; ++k) pi *= ((mask >> k) & 1u) ? p_hat : 1.0L - p_hat;
          const unsigned c = a ^ (b & mask);
          j.p[a | (b << dims) | (c << (2 * dims))] += pa * pa * pi;
        }
      }
    }
  }
  return j;
}

/// Shannon entropy (nats) of the marginal over the modalities whose bit is
/// set in `which` (1 = a, 2 = b, 4 = c).
inline Real entropy(const Joint3& j, unsigned which) {
  std::vector<Real> marg(std::size_t{1} << (3 * j.dims), 0.0L);
  for (std::size_t s = 0; s < j.p.size(); ++s) {
    std::size_t key = 0;
    for (int m = 0; m < 3; ++m) {
      if (which & (1u << m)) key |= static_cast<std::size_t>(j.part(s, m)) << (m * j.dims);
    }
    marg[key] += j.p[s];
  }
  Real h = 0.0L;
  for (Real q : marg) {
    if (q > 0.0L) h -= q * std::log(q);
  }
  return h;
}

inline Real mi(const Joint3& j, unsigned x, unsigned y) { return entropy(j, x) + entropy(j, y) - entropy(j, x | y); }

inline Real cmi(const Joint3& j, unsigned x, unsigned y, unsigned z) {
  return entropy(j, x | z) + entropy(j, y | z) - entropy(j, x | y | z) - entropy(j, z);
}

inline Real tc(const Joint3& j) { return entropy(j, 1) + entropy(j, 2) + entropy(j, 4) - entropy(j, 7); }

/// Expected contrastive bound on the XOR table with the optimal scorer. Each
/// of the N-1 negatives lands on the support with probability 1/2, so with
/// K ~ Binomial(N-1, 1/2) the bound is log N - E[log(1 + K)].
inline Real xor_bound(std::size_t n) {
  const std::size_t trials = n - 1;
  Real expect = 0.0L;
  Real log_choose = 0.0L;
  for (std::size_t k = 0; k <= trials; ++k) {
    if (k > 0) log_choose += std::log(static_cast<Real>(trials - k + 1)) - std::log(static_cast<Real>(k));
    const Real w = std::exp(log_choose - static_cast<Real>(trials) * std::log(2.0L));
    expect += w * std::log1p(static_cast<Real>(k));
  }
  return std::log(static_cast<Real>(n)) - expect;
}

/// Bayes-optimal zero-shot accuracy for b on the 5-bit data: with probability
/// p_hat, b = a XOR c is identified; otherwise one of 32 guesses.
inline double bayes_accuracy_5d(double p_hat) { return p_hat * 31.0 / 32.0 + 1.0 / 32.0; }

inline Real log_sum_exp(const std::vector<Real>& v) {
  Real m = v.front();
  for (Real x : v) m = std::max(m, x);
  Real s = 0.0L;
  for (Real x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline Real row_dot(const symile::Matrix& x, std::size_t i, const symile::Matrix& y, std::size_t j) {
  Real s = 0.0L;
  for (std::size_t c = 0; c < x.cols(); ++c) s += static_cast<Real>(x(i, c)) * y(j, c);
  return s;
}

/// Mean over rows of -log softmax, rows i of x against all rows of y.
inline Real clip_direction(const symile::Matrix& x, const symile::Matrix& y, double scale) {
  const std::size_t n = x.rows();
  Real total = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Real> logits(n);
    for (std::size_t j = 0; j < n; ++j) logits[j] = scale * row_dot(x, i, y, j);
    total += log_sum_exp(logits) - logits[i];
  }
  return total / static_cast<Real>(n);
}

inline Real clip_pair(const symile::Matrix& x, const symile::Matrix& y, double scale) {
  return 0.5L * (clip_direction(x, y, scale) + clip_direction(y, x, scale));
}

/// Multilinear inner product of row `rows[m]` of each matrix.
inline Real mip(const std::vector<const symile::Matrix*>& mats, const std::vector<std::size_t>& rows) {
  Real s = 0.0L;
  for (std::size_t c = 0; c < mats.front()->cols(); ++c) {
    Real prod = 1.0L;
    for (std::size_t m = 0; m < mats.size(); ++m) prod *= (*mats[m])(rows[m], c);
    s += prod;
  }
  return s;
}

/// Symile loss with permuted negatives: anchor row i is scored against the
/// tuple built from row perm[m][j] of every other modality m (row i itself,
/// unpermuted, for the positive j = i).
inline Real symile_permuted(const std::vector<symile::Matrix>& reps, double scale,
                            const std::vector<std::vector<std::vector<std::size_t>>>& perms) {
  const std::size_t m_count = reps.size();
  const std::size_t n = reps.front().rows();
  Real total = 0.0L;
  for (std::size_t a = 0; a < m_count; ++a) {
    std::vector<const symile::Matrix*> mats;
    mats.push_back(&reps[a]);
    for (std::size_t m = 0; m < m_count; ++m) {
      if (m != a) mats.push_back(&reps[m]);
    }
    Real anchor_total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Real> logits(n);
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> rows = {i};
        for (std::size_t m = 0; m < m_count; ++m) {
          if (m != a) rows.push_back(j == i ? i : perms[a][m][j]);
        }
        logits[j] = scale * mip(mats, rows);
      }
      anchor_total += log_sum_exp(logits) - logits[i];
    }
    total += anchor_total / static_cast<Real>(n);
  }
  return total / static_cast<Real>(m_count);
}

/// Symile loss over all N^2 (y, z) combinations for three modalities.
inline Real symile_all_pairs(const std::vector<symile::Matrix>& reps, double scale) {
  const std::size_t n = reps.front().rows();
  Real total = 0.0L;
  for (std::size_t a = 0; a < 3; ++a) {
    const std::size_t y = a == 0 ? 1 : 0;
    const std::size_t z = a == 2 ? 1 : 2;
    const std::vector<const symile::Matrix*> mats = {&reps[a], &reps[y], &reps[z]};
    Real anchor_total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Real> logits;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) logits.push_back(scale * mip(mats, {i, j, k}));
      }
      anchor_total += log_sum_exp(logits) - logits[i * n + i];
    }
    total += anchor_total / static_cast<Real>(n);
  }
  return total / 3.0L;
}

}  // namespace ref

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

#include "symile/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "symile/error.hpp"

namespace symile {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidArgument("Matrix::from_rows: ragged rows");
    std::copy(row.begin(), row.end(), m.row(i).begin());
    ++i;
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) throw InvalidArgument("Matrix::slice_rows: range out of bounds");
  Matrix m(end - begin, cols_);
  std::copy(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>(end * cols_), m.data_.begin());
  return m;
}

Matrix Matrix::gather_rows(std::span<const std::size_t> idx) const {
  Matrix m(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= rows_) throw InvalidArgument("Matrix::gather_rows: index out of range");
    const auto src = row(idx[i]);
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return m;
}

void Matrix::fill(double v) noexcept { std::fill(data_.begin(), data_.end(), v); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InvalidArgument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw InvalidArgument("matmul_nt: inner dimension mismatch");
  constexpr std::size_t kPanel = 8;
  const std::size_t d = a.cols();
  const std::size_t nb = b.rows();
  const std::size_t full = nb / kPanel;
  // b packed as [panel][k][lane] so the lane loop is contiguous.
  std::vector<double> packed(full * d * kPanel);
  for (std::size_t p = 0; p < full; ++p) {
    for (std::size_t l = 0; l < kPanel; ++l) {
      const double* src = b.row(p * kPanel + l).data();
      for (std::size_t k = 0; k < d; ++k) packed[(p * d + k) * kPanel + l] = src[k];
    }
  }
  Matrix out(a.rows(), nb);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i).data();
    double* oi = out.row(i).data();
    for (std::size_t p = 0; p < full; ++p) {
      const double* panel = packed.data() + p * d * kPanel;
      double s[kPanel] = {};
      for (std::size_t k = 0; k < d; ++k) {
        const double x = ai[k];
        for (std::size_t l = 0; l < kPanel; ++l) s[l] += x * panel[k * kPanel + l];
      }
      for (std::size_t l = 0; l < kPanel; ++l) oi[p * kPanel + l] = s[l];
    }
    for (std::size_t j = full * kPanel; j < nb; ++j) {
      const double* bj = b.row(j).data();
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += ai[k] * bj[k];
      oi[j] = s;
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  }
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matmul: inner dimension mismatch");
  return matmul_nt(a, transpose(b));
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidArgument("matmul_tn: inner dimension mismatch");
  return matmul_nt(transpose(a), transpose(b));
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("hadamard: shape mismatch");
  }
  Matrix out(a.rows(), a.cols());
  auto o = out.flat();
  auto x = a.flat();
  auto y = b.flat();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
  return out;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace symile

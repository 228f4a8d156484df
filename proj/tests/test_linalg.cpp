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

#include "symile/error.hpp"
#include "symile/linalg.hpp"
#include "symile/rng.hpp"

namespace symile {
namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.flat()) v = 2.0 * rng.uniform() - 1.0;
  return m;
}

double naive(const Matrix& a, const Matrix& b, std::size_t i, std::size_t j, bool b_transposed) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * (b_transposed ? b(j, k) : b(k, j));
  return s;
}

TEST(LinalgTest, ProductsAgreeWithDefinition) {
  Rng rng(5);
  for (std::size_t n : {1u, 3u, 8u, 13u}) {
    const Matrix a = random_matrix(n, 5, rng);
    const Matrix b = random_matrix(n + 2, 5, rng);
    const Matrix nt = matmul_nt(a, b);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < b.rows(); ++j) {
        EXPECT_EQ(nt(i, j), naive(a, b, i, j, true));
        EXPECT_EQ(nt(i, j), dot(a.row(i), b.row(j)));
      }
    }
    const Matrix c = random_matrix(5, 4, rng);
    const Matrix ab = matmul(a, c);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(ab(i, j), naive(a, c, i, j, false), 1e-15);
    }
    const Matrix d = random_matrix(n, 3, rng);
    const Matrix tn = matmul_tn(a, d);
    const Matrix at = transpose(a);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(tn(i, j), naive(at, d, i, j, false), 1e-15);
    }
  }
}

TEST(LinalgTest, ShapeErrors) {
  EXPECT_THROW(matmul_nt(Matrix(2, 3), Matrix(2, 4)), InvalidArgument);
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), InvalidArgument);
  EXPECT_THROW(matmul_tn(Matrix(2, 3), Matrix(3, 3)), InvalidArgument);
  EXPECT_THROW(hadamard(Matrix(2, 3), Matrix(3, 2)), InvalidArgument);
  const std::vector<double> x = {1.0, 2.0};
  const std::vector<double> y = {1.0};
  EXPECT_THROW(dot(x, y), InvalidArgument);
}

TEST(LinalgTest, RowOperations) {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(m.rows(), 3u);
  EXPECT_EQ(m.slice_rows(1, 3), Matrix::from_rows({{3, 4}, {5, 6}}));
  const std::vector<std::size_t> idx = {2, 0};
  EXPECT_EQ(m.gather_rows(idx), Matrix::from_rows({{5, 6}, {1, 2}}));
  EXPECT_EQ(hadamard(m, m), Matrix::from_rows({{1, 4}, {9, 16}, {25, 36}}));
  EXPECT_DOUBLE_EQ(norm2(m.row(0)), std::sqrt(5.0));
  EXPECT_EQ(Matrix::identity(2), Matrix::from_rows({{1, 0}, {0, 1}}));
  EXPECT_EQ(max_abs(m.flat()), 6.0);
}

}  // namespace
}  // namespace symile

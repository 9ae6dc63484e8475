// Copyright 2026 The ssplmm Authors.
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

#ifndef SSPLMM_SRC_DENSE_LU_H_
#define SSPLMM_SRC_DENSE_LU_H_

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ssplmm::internal {

// Solves the n x n row-major system A x = b by Gaussian elimination with
// partial pivoting. Returns nullopt if a pivot falls below `singular_tol`
// relative to the largest entry of A. Real is double or long double.
template <typename Real>
std::optional<std::vector<Real>> solve_dense(std::vector<Real> matrix,
                                             std::vector<Real> rhs,
                                             Real singular_tol = Real(1e-14)) {
  const std::size_t n = rhs.size();
  if (matrix.size() != n * n) {
    throw std::invalid_argument("solve_dense: matrix is not n x n");
  }
  Real scale = 0;
  for (Real v : matrix) scale = std::max(scale, std::abs(v));
  if (scale == 0) return std::nullopt;

  auto at = [&](std::size_t i, std::size_t j) -> Real& {
    return matrix[i * n + j];
  };
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (std::abs(at(i, col)) > std::abs(at(pivot, col))) pivot = i;
    }
    if (std::abs(at(pivot, col)) <= singular_tol * scale) return std::nullopt;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(at(col, j), at(pivot, j));
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const Real factor = at(i, col) / at(col, col);
      if (factor == 0) continue;
      for (std::size_t j = col; j < n; ++j) at(i, j) -= factor * at(col, j);
      rhs[i] -= factor * rhs[col];
    }
  }
  std::vector<Real> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Real sum = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) sum -= at(i, j) * x[j];
    x[i] = sum / at(i, i);
  }
  return x;
}

// Determinant of an n x n row-major matrix.
double determinant(std::vector<double> matrix, int n);

}  // namespace ssplmm::internal

#endif  // SSPLMM_SRC_DENSE_LU_H_

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

#include "dense_lu.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace ssplmm::internal {

double determinant(std::vector<double> matrix, int n) {
  const auto size = static_cast<std::size_t>(n);
  if (matrix.size() != size * size) {
    throw std::invalid_argument("determinant: matrix is not n x n");
  }
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return matrix[i * size + j];
  };
  double det = 1.0;
  for (std::size_t col = 0; col < size; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < size; ++i) {
      if (std::abs(at(i, col)) > std::abs(at(pivot, col))) pivot = i;
    }
    if (at(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t j = 0; j < size; ++j) std::swap(at(col, j), at(pivot, j));
      det = -det;
    }
    det *= at(col, col);
    for (std::size_t i = col + 1; i < size; ++i) {
      const double factor = at(i, col) / at(col, col);
      for (std::size_t j = col; j < size; ++j) at(i, j) -= factor * at(col, j);
    }
  }
  return det;
}

}  // namespace ssplmm::internal

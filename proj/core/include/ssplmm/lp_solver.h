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

// Dense feasibility engine for {x >= 0 : A x = b}.
//
// The engine is a phase-1 primal simplex on an equilibrated tableau, using
// Bland's rule so that degenerate pivots cannot cycle. Problems handled here
// are tiny (tens of rows, at most a few hundred columns), so the tableau is
// stored densely and rebuilt for each call.

#ifndef SSPLMM_LP_SOLVER_H_
#define SSPLMM_LP_SOLVER_H_

#include <optional>
#include <span>
#include <vector>

namespace ssplmm {

struct LpProblem {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<double> matrix;  // row-major, n_rows * n_cols
  std::vector<double> rhs;     // n_rows

  static LpProblem zeros(int n_rows, int n_cols);

  double& at(int row, int col) { return matrix[row * n_cols + col]; }
  double at(int row, int col) const { return matrix[row * n_cols + col]; }

  // Throws std::invalid_argument on a dimension mismatch or a non-finite entry.
  void validate() const;
};

struct LpSolution {
  std::vector<double> x;
  // Basic columns, one per independent row (listed in `rows`).
  std::vector<int> basis;
  std::vector<int> rows;
  // max_i |(A x - b)_i| / max(1, |b_i|).
  double residual_norm = 0.0;
};

struct LpOptions {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-11;
};

// Returns a basic feasible solution, or nullopt if none exists.
std::optional<LpSolution> solve_feasibility(const LpProblem& problem,
                                            const LpOptions& options = {});

// Returns v with v^T A <= 0 and v^T b > 0 (up to tolerance, max-norm 1) when
// the system is infeasible; nullopt when it is feasible or no certificate
// survives the verification in original units.
std::optional<std::vector<double>> certify_infeasible(
    const LpProblem& problem, const LpOptions& options = {});

// max_i |(A x - b)_i| / max(1, |b_i|).
double relative_residual(const LpProblem& problem, std::span<const double> x);

// Number of entries strictly above `threshold`.
int positive_support(std::span<const double> x, double threshold = 1e-10);

}  // namespace ssplmm

#endif  // SSPLMM_LP_SOLVER_H_

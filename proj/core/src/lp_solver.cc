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

#include "ssplmm/lp_solver.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dense_lu.h"
#include "numeric.h"

namespace ssplmm {

LpProblem LpProblem::zeros(int n_rows, int n_cols) {
  LpProblem problem;
  problem.n_rows = n_rows;
  problem.n_cols = n_cols;
  problem.matrix.assign(static_cast<std::size_t>(n_rows) * n_cols, 0.0);
  problem.rhs.assign(n_rows, 0.0);
  return problem;
}

void LpProblem::validate() const {
  if (n_rows < 1 || n_cols < 1) {
    throw std::invalid_argument("LP must have at least one row and column");
  }
  if (matrix.size() != static_cast<std::size_t>(n_rows) * n_cols ||
      rhs.size() != static_cast<std::size_t>(n_rows)) {
    throw std::invalid_argument("LP dimension mismatch");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(matrix.begin(), matrix.end(), finite) ||
      !std::all_of(rhs.begin(), rhs.end(), finite)) {
    throw std::invalid_argument("LP has a non-finite entry");
  }
}

double relative_residual(const LpProblem& problem, std::span<const double> x) {
  double worst = 0.0;
  for (int i = 0; i < problem.n_rows; ++i) {
    internal::CompensatedSum sum;
    for (int j = 0; j < problem.n_cols; ++j) sum.add(problem.at(i, j) * x[j]);
    sum.add(-problem.rhs[i]);
    const double scale = std::max(1.0, std::abs(problem.rhs[i]));
    worst = std::max(worst, std::abs(sum.value()) / scale);
  }
  return worst;
}

int positive_support(std::span<const double> x, double threshold) {
  return static_cast<int>(
      std::count_if(x.begin(), x.end(), [&](double v) { return v > threshold; }));
}

namespace {

// Phase-1 tableau for  min sum(a)  s.t.  A' x + a = b',  x, a >= 0,  where
// A' = diag(sign * row_scale) A diag(col_scale) and b' >= 0.
class PhaseOne {
 public:
  PhaseOne(const LpProblem& problem, const LpOptions& options)
      : m_(problem.n_rows),
        n_(problem.n_cols),
        width_(n_ + m_ + 1),
        options_(options),
        row_scale_(m_, 1.0),
        col_scale_(n_, 1.0),
        tableau_(static_cast<std::size_t>(m_ + 1) * width_, 0.0),
        basis_(m_),
        redundant_(m_, false) {
    equilibrate(problem);
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        at(i, j) = row_scale_[i] * problem.at(i, j) * col_scale_[j];
      }
      at(i, n_ + i) = 1.0;
      at(i, rhs_col()) = row_scale_[i] * problem.rhs[i];
      basis_[i] = n_ + i;
    }
    // Reduced costs of the artificial objective: d_j = -sum_i A'_ij.
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) cost(j) -= at(i, j);
      cost(rhs_col()) -= at(i, rhs_col());
    }
  }

  void run() {
    const int max_iterations = 200 * (m_ + n_) + 1000;
    for (int iter = 0; iter < max_iterations; ++iter) {
      // Bland: lowest-index improving structural column.
      int entering = -1;
      for (int j = 0; j < n_; ++j) {
        if (cost(j) < -options_.pivot_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return;
      int leaving = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double t = at(i, entering);
        if (t <= options_.pivot_tol) continue;
        const double ratio = at(i, rhs_col()) / t;
        if (leaving < 0 || ratio < best_ratio - 1e-13 * (1.0 + best_ratio) ||
            (ratio <= best_ratio + 1e-13 * (1.0 + best_ratio) &&
             basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving < 0) {
        // The artificial objective is bounded below; an unbounded ray means
        // the improving entry is numerical noise.
        cost(entering) = 0.0;
        continue;
      }
      pivot(leaving, entering);
    }
    throw std::runtime_error("phase-1 simplex exceeded its iteration budget");
  }

  double objective() const {
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) total += std::max(at(i, rhs_col()), 0.0);
    }
    return total;
  }

  bool feasible() const {
    return objective() <= options_.feas_tol * std::max(1.0, initial_rhs_max_);
  }

  // Pivots zero-level artificials out of the basis; rows with no usable
  // structural entry are linearly dependent and get marked redundant.
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      int best = -1;
      for (int j = 0; j < n_; ++j) {
        if (std::abs(at(i, j)) > options_.pivot_tol * 100 &&
            (best < 0 || std::abs(at(i, j)) > std::abs(at(i, best)))) {
          best = j;
        }
      }
      if (best < 0) {
        redundant_[i] = true;
      } else {
        pivot(i, best);
      }
    }
  }

  // Basic solution in original units.
  LpSolution extract(const LpProblem& problem) const {
    LpSolution solution;
    for (int i = 0; i < m_; ++i) {
      if (redundant_[i]) continue;
      solution.rows.push_back(i);
      solution.basis.push_back(basis_[i]);
    }

    std::vector<double> from_tableau(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (!redundant_[i] && basis_[i] < n_) {
        from_tableau[basis_[i]] =
            std::max(at(i, rhs_col()), 0.0) * col_scale_[basis_[i]];
      }
    }
    solution.x = from_tableau;
    solution.residual_norm = relative_residual(problem, solution.x);

    // Re-solve B x_B = b on the original data; this usually recovers the
    // digits lost to accumulated pivoting.
    const std::size_t size = solution.rows.size();
    if (size > 0) {
      std::vector<double> matrix(size * size);
      std::vector<double> rhs(size);
      for (std::size_t r = 0; r < size; ++r) {
        const int row = solution.rows[r];
        rhs[r] = problem.rhs[row] * row_scale_[row];
        for (std::size_t c = 0; c < size; ++c) {
          const int col = solution.basis[c];
          matrix[r * size + c] =
              row_scale_[row] * problem.at(row, col) * col_scale_[col];
        }
      }
      if (auto xb = internal::solve_dense(std::move(matrix), std::move(rhs))) {
        std::vector<double> refined(n_, 0.0);
        for (std::size_t c = 0; c < size; ++c) {
          refined[solution.basis[c]] =
              std::max((*xb)[c], 0.0) * col_scale_[solution.basis[c]];
        }
        const double residual = relative_residual(problem, refined);
        if (residual < solution.residual_norm) {
          solution.x = std::move(refined);
          solution.residual_norm = residual;
        }
      }
    }
    return solution;
  }

  // Dual vector of the phase-1 problem mapped back to the original rows:
  // w_i = 1 - d_{artificial i} in scaled units.
  std::vector<double> farkas_vector() const {
    std::vector<double> v(m_);
    double norm = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double w = 1.0 - cost(n_ + i);
      v[i] = w * row_scale_[i];
      norm = std::max(norm, std::abs(v[i]));
    }
    if (norm > 0.0) {
      for (double& value : v) value /= norm;
    }
    return v;
  }

 private:
  double& at(int i, int j) { return tableau_[i * width_ + j]; }
  double at(int i, int j) const { return tableau_[i * width_ + j]; }
  double& cost(int j) { return tableau_[m_ * width_ + j]; }
  double cost(int j) const { return tableau_[m_ * width_ + j]; }
  int rhs_col() const { return n_ + m_; }

  void equilibrate(const LpProblem& problem) {
    for (int i = 0; i < m_; ++i) {
      double largest = 0.0;
      for (int j = 0; j < n_; ++j) {
        largest = std::max(largest, std::abs(problem.at(i, j)));
      }
      row_scale_[i] = largest > 0.0 ? 1.0 / largest : 1.0;
    }
    for (int j = 0; j < n_; ++j) {
      double largest = 0.0;
      for (int i = 0; i < m_; ++i) {
        largest = std::max(largest, std::abs(row_scale_[i] * problem.at(i, j)));
      }
      col_scale_[j] = largest > 0.0 ? 1.0 / largest : 1.0;
    }
    for (int i = 0; i < m_; ++i) {
      if (problem.rhs[i] < 0.0) row_scale_[i] = -row_scale_[i];
      initial_rhs_max_ = std::max(initial_rhs_max_,
                                  std::abs(row_scale_[i] * problem.rhs[i]));
    }
  }

  void pivot(int row, int col) {
    const double inv = 1.0 / at(row, col);
    for (int j = 0; j < width_; ++j) at(row, j) *= inv;
    at(row, col) = 1.0;
    for (int i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double factor = tableau_[i * width_ + col];
      if (factor == 0.0) continue;
      for (int j = 0; j < width_; ++j) {
        tableau_[i * width_ + j] -= factor * at(row, j);
      }
      tableau_[i * width_ + col] = 0.0;
    }
    basis_[row] = col;
  }

  int m_;
  int n_;
  int width_;
  LpOptions options_;
  std::vector<double> row_scale_;  // carries the row sign normalization
  std::vector<double> col_scale_;
  std::vector<double> tableau_;    // m_ constraint rows plus the cost row
  std::vector<int> basis_;
  std::vector<bool> redundant_;
  double initial_rhs_max_ = 0.0;
};

}  // namespace

std::optional<LpSolution> solve_feasibility(const LpProblem& problem,
                                            const LpOptions& options) {
  problem.validate();
  PhaseOne phase(problem, options);
  phase.run();
  if (!phase.feasible()) return std::nullopt;
  phase.expel_artificials();
  LpSolution solution = phase.extract(problem);
  if (solution.residual_norm > options.feas_tol) return std::nullopt;
  return solution;
}

std::optional<std::vector<double>> certify_infeasible(
    const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  PhaseOne phase(problem, options);
  phase.run();
  if (phase.feasible()) return std::nullopt;
  std::vector<double> v = phase.farkas_vector();

  // Verify in original units: v^T A_j <= tol * |v|^T |A_j| and v^T b > 0.
  for (int j = 0; j < problem.n_cols; ++j) {
    internal::CompensatedSum dot;
    double magnitude = 0.0;
    for (int i = 0; i < problem.n_rows; ++i) {
      dot.add(v[i] * problem.at(i, j));
      magnitude += std::abs(v[i] * problem.at(i, j));
    }
    if (dot.value() > options.feas_tol * std::max(magnitude, 1e-300)) {
      return std::nullopt;
    }
  }
  internal::CompensatedSum gain;
  double magnitude = 0.0;
  for (int i = 0; i < problem.n_rows; ++i) {
    gain.add(v[i] * problem.rhs[i]);
    magnitude += std::abs(v[i] * problem.rhs[i]);
  }
  if (!(gain.value() > options.feas_tol * magnitude)) return std::nullopt;
  return v;
}

}  // namespace ssplmm

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

// Optimal SSP multistep methods by bisection over linear feasibility problems.
//
// For a fixed candidate coefficient r the monotonicity conditions and the
// order conditions are linear in the slack variables
//   gamma_j = alpha_j - r beta_j - r_second beta_second_j
// and the weights, so "is there a k-step, order-p method that is SSP with
// coefficients (r, y r)?" is an LP feasibility question. The feasible set in
// r is an interval starting at zero, and the optimal coefficient is its
// right end point.
//
// LP column layouts (n_cols):
//   classical, perturbed, additive:  gamma[0,k) beta[0,k] beta_second[0,k]  (3k+2)
//   imex:                            gamma[0,k) beta[0,k) beta_hat[0,k]     (3k+1)

#ifndef SSPLMM_OPTIMIZER_H_
#define SSPLMM_OPTIMIZER_H_

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ssplmm/lp_solver.h"
#include "ssplmm/method.h"

namespace ssplmm {

enum class MethodClass { kClassical, kPerturbed, kAdditive, kImex };

std::string_view to_string(MethodClass kind);
std::optional<MethodClass> parse_method_class(std::string_view name);

struct OptimizerOptions {
  double bisect_tol = 1e-6;
  // Initial upper bracket for p >= 2 is 2 * (1 + bracket_margin); no method
  // of order two or more has a larger coefficient.
  double bracket_margin = 0.1;
  double r_cap = 1e6;
  LpOptions lp;
};

// Thrown when the feasible interval in r still contains r_cap.
class BracketCapError : public std::runtime_error {
 public:
  explicit BracketCapError(double cap)
      : std::runtime_error("SSP coefficient is unbounded (bracket capped)"),
        cap_(cap) {}
  double cap() const { return cap_; }

 private:
  double cap_;
};

struct OptimalMethodResult {
  MethodClass kind = MethodClass::kClassical;
  MethodTable method;
  SspCertificate certificate;
  int k = 0;
  int p = 0;
  double y = 0.0;
  // The class restriction the optimization ran under (imex is never explicit).
  bool explicit_flag = true;
  double bisection_gap = 0.0;
  int nonzero_count = 0;
  // The witnessing LP point in the layout of build_lp().
  std::vector<double> lp_point;
};

struct RegionSample {
  double y = 0.0;
  double c = 0.0;
  double c_second = 0.0;
};

LpProblem build_classical_lp(int k, int p, double r, bool explicit_flag);
LpProblem build_perturbed_lp(int k, int p, double y, double r,
                             bool explicit_flag);
LpProblem build_additive_lp(int k, int p, double y, double r,
                            bool explicit_flag);
LpProblem build_imex_lp(int k, int p, double y, double r);
LpProblem build_lp(MethodClass kind, int k, int p, double y, double r,
                   bool explicit_flag);

// Rebuilds the method table from an LP point at coefficient r.
MethodTable method_from_lp_point(MethodClass kind, int k, double y, double r,
                                 std::span<const double> point);

// Optimal k-step, order-p method of the given class for ratio y. Returns
// nullopt when no method with a positive SSP coefficient exists. Throws
// BracketCapError when the coefficient is unbounded up to r_cap.
std::optional<OptimalMethodResult> optimal_method(
    MethodClass kind, int k, int p, double y, bool explicit_flag,
    const OptimizerOptions& options = {});

// Wraps a fixed table as a result at its own SSP coefficient for ratio y, so
// the verification functions below apply to tables from any source. IMEX
// tables are additive tables with beta[k] == 0. Returns nullopt when the
// coefficient is zero.
std::optional<OptimalMethodResult> result_for_table(MethodClass kind,
                                                    const MethodTable& method,
                                                    int p, double y);

// One sample per y; y_grid must be nonnegative and strictly increasing.
// threads <= 0 selects the hardware concurrency. Output order follows y_grid.
std::vector<RegionSample> region_scan(MethodClass kind, int k, int p,
                                      std::span<const double> y_grid,
                                      bool explicit_flag,
                                      const OptimizerOptions& options = {},
                                      int threads = 1);

// Positive-support bound on an optimal point (entries above 1e-10 count):
// at most p for classical, perturbed and additive results. Additive results
// are counted in their canonical form beta_hat == beta. IMEX results are only
// held to the basic-solution bound of one positive per LP row.
bool verify_nonzero_bound(const OptimalMethodResult& result);

// The additive table rewritten with equal weight sequences, if that rewrite
// keeps the monotonicity conditions at the result's coefficient.
std::optional<MethodTable> canonical_additive(const OptimalMethodResult& result);

// True iff max_j |beta_j - beta_hat_j| <= 1e-8, possibly after the canonical
// rewrite.
bool verify_additive_beta_equality(const OptimalMethodResult& result);

enum class Uniqueness { kUnique, kInconclusive };

// Determinant sign test on the active moment vectors of an optimal perturbed
// (or classical) method. Throws std::invalid_argument unless the positive
// support has exactly p entries.
Uniqueness uniqueness_test(const OptimalMethodResult& result);

}  // namespace ssplmm

#endif  // SSPLMM_OPTIMIZER_H_

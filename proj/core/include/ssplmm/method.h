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

// Coefficient algebra for k-step linear multistep methods (LMMs).
//
// Three coefficient layouts share one container:
//
//   classical   u_n = sum a_j u_{n-k+j} + dt sum b_j F(u_{n-k+j})
//   perturbed   u_n = sum a_j u_{n-k+j} + dt sum (b_j F - bs_j Fs)(u_{n-k+j})
//   additive    u_n = sum a_j u_{n-k+j} + dt sum (b_j F + bs_j Fh)(u_{n-k+j})
//
// where `bs` is `MethodTable::beta_second`. In the perturbed form `Fs` is a
// downwind-biased twin of `F` that satisfies the forward Euler condition with
// reversed sign; in the additive form `Fh` is a second right-hand-side term.

#ifndef SSPLMM_METHOD_H_
#define SSPLMM_METHOD_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ssplmm {

inline constexpr int kMaxSteps = 64;
inline constexpr double kOrderTolerance = 1e-10;
// Coefficients below this magnitude are treated as exact zeros.
inline constexpr double kCoefficientFlush = 1e-13;

enum class Family { kClassical, kPerturbed, kAdditive };

std::string_view to_string(Family family);
std::optional<Family> parse_family(std::string_view name);

struct MethodTable {
  int k = 0;
  Family family = Family::kClassical;
  std::vector<double> alpha;        // k entries
  std::vector<double> beta;         // k + 1 entries
  std::vector<double> beta_second;  // k + 1 entries, zero for classical
  bool explicit_flag = true;

  // Throws std::invalid_argument if sizes or the explicit flag are
  // inconsistent, or if k is outside [1, kMaxSteps].
  void validate() const;

  bool is_implicit() const;
};

// Builds a table and validates it. `beta_second` may be empty for classical.
MethodTable make_method(Family family, std::vector<double> alpha,
                        std::vector<double> beta,
                        std::vector<double> beta_second = {});

// A witness of the monotonicity conditions
//   beta_j, beta_second_j >= 0,  alpha_j - r beta_j - r_second beta_second_j = gamma_j >= 0
// with r_second = y r.
//
// When every weight on the history entries is zero the conditions hold for
// all r; such a certificate has `unbounded == true` and r == r_second == 0.
struct SspCertificate {
  double r = 0.0;
  double r_second = 0.0;
  double y = 0.0;
  std::vector<double> gamma;
  bool unbounded = false;
};

// Left-minus-right residuals of the order conditions through order p.
//
// Classical and perturbed tables are checked through their underlying
// method (weights beta - beta_second). For additive tables the result is the
// F-side residuals followed by the second-term residuals, p + 1 each.
std::vector<double> order_residuals(const MethodTable& method, int p);

double max_abs(std::span<const double> values);

// True iff every order residual through p is within kOrderTolerance.
bool satisfies_order(const MethodTable& method, int p);

// Largest r such that the table is SSP with coefficients (r, y r). Returns
// nullopt when that coefficient is zero: a negative weight, a negative
// alpha, or alpha_j == 0 paired with a positive weight.
std::optional<SspCertificate> ssp_coefficient_pair(const MethodTable& method,
                                                   double y);

// The classical method recovered by replacing the downwind operator with F.
MethodTable to_underlying(const MethodTable& method);

// Cancels simultaneous upwind and downwind weights so that for every j at most
// one of beta_j, beta_second_j is nonzero. The underlying method is unchanged
// and the SSP coefficient cannot decrease.
MethodTable canonicalize_downwind(const MethodTable& method);

// a_j = (1, j, j^2, ..., j^p).
std::vector<double> moment_vector(int j, int p);

// b+-_j(x) = a_j +- x a'_j for j < k and +- x a'_k for j == k, where
// a'_j = (0, 1, 2 j, ..., p j^{p-1}).
std::vector<double> moment_vector_perturbed(int j, int p, int sign, double x,
                                            int k);

}  // namespace ssplmm

#endif  // SSPLMM_METHOD_H_

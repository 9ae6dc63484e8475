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

// Ready-made test problems.

#ifndef SSPLMM_PROBLEMS_H_
#define SSPLMM_PROBLEMS_H_

#include <span>

#include "ssplmm/integrator.h"

namespace ssplmm {

// u' = u^2 (u - 1), upwind radius 4 and downwind radius 1 for [0, 1].
IvpProblem scalar_cubic_problem(double u0 = 0.5);

enum class FluxKind { kLinear };

// Periodic advection-reaction  u_t + f(u)_x = s(u),  s(u) = -mu u (u-1) (u-1/2).
struct LeVequeYeeConfig {
  int m = 200;
  double dx = 1.0 / 200;
  double mu = 400.0 / 3.0;  // mu * tau = 2/3 with the default tau
  double tau = 1.0 / 200;
  FluxKind flux = FluxKind::kLinear;

  // Throws std::invalid_argument unless m >= 3 and dx, mu, tau > 0.
  void validate() const;
  // m points with dx = 1/m and tau = dx.
  static LeVequeYeeConfig with_grid(int m, double mu_tau);
};

// F = D + S (upwind), F~ = D~ + S (downwind twin).
IvpProblem leveque_yee_problem(const LeVequeYeeConfig& config);
// F = D (explicit), G = S (implicit, exact diagonal Jacobian).
IvpProblem leveque_yee_imex_problem(const LeVequeYeeConfig& config);

double reaction_source(double mu, double u);

// 0.5 (tanh((x - 1/4)/w) - tanh((x - 3/4)/w)) at cell centres, in [0, 1].
State smoothed_step_profile(int m);

// max over components of max(u - 1, -u, 0).
double containment_violation(const State& u);
double total_variation(const State& u);  // periodic

// (sum 1/eps_i)^-1; rejects an empty list or nonpositive entries.
double harmonic_step_size(std::span<const double> eps);

}  // namespace ssplmm

#endif  // SSPLMM_PROBLEMS_H_

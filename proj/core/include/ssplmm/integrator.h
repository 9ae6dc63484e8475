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

// Fixed-step time integration with any MethodTable, plus the discrete
// monotonicity diagnostics used to check SSP step-size guarantees.

#ifndef SSPLMM_INTEGRATOR_H_
#define SSPLMM_INTEGRATOR_H_

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ssplmm/method.h"

namespace ssplmm {

using State = std::vector<double>;
using Operator = std::function<State(const State&)>;
// Row-major dimension x dimension Jacobian.
using JacobianOperator = std::function<std::vector<double>(const State&)>;

// kPerturbed: rhs_second is a downwind twin of rhs_f (u' = F(u)).
// kAdditive:  rhs_second is a second term (u' = F(u) + G(u)).
enum class ProblemFlavor { kPerturbed, kAdditive };

// kNorm: the functional is a convex functional and monotonicity means
//   ||u_n|| <= max(||u_{n-1}||, ..., ||u_{n-k}||).
// kContainment: the functional is a nonnegative violation of an invariant set
// and monotonicity means it stays zero.
enum class MeasureKind { kNorm, kContainment };

struct IvpProblem {
  int dimension = 1;
  ProblemFlavor flavor = ProblemFlavor::kPerturbed;
  Operator rhs_f;
  Operator rhs_second;
  double dt_fe = 1.0;
  double dt_fe_second = 1.0;
  std::function<double(const State&)> functional;
  MeasureKind measure_kind = MeasureKind::kContainment;
  State initial_state;
  // Optional exact Jacobians; finite differences are used otherwise.
  JacobianOperator jacobian_f;
  JacobianOperator jacobian_second;

  double y() const { return dt_fe / dt_fe_second; }
  void validate() const;
};

IvpProblem with_initial_state(IvpProblem problem, State initial_state);

struct Trajectory {
  std::vector<State> states;
  double dt = 0.0;
  std::vector<double> measures;
  MeasureKind measure_kind = MeasureKind::kContainment;
};

struct NewtonOptions {
  double tol = 1e-12;  // scaled by max(1, ||u||_inf)
  int max_iterations = 50;
  int max_halvings = 8;
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// One step of the method. `history` holds the k most recent states, oldest
// first. Implicit tables are solved with damped Newton; throws NewtonError on
// non-convergence and std::invalid_argument if the method family does not fit
// the problem flavor.
State step(const MethodTable& method, const IvpProblem& problem,
           std::span<const State> history, double dt,
           const NewtonOptions& newton = {});

enum class Starting { kEulerSpinup, kSupplied };

// Largest dt for which the forward Euler spin-up is itself monotone: dt_fe,
// or the harmonic combination of both radii for additive problems.
double spinup_radius(const IvpProblem& problem);

// Trajectory of n_steps + k states. kEulerSpinup generates u_1..u_{k-1} from
// problem.initial_state by forward Euler at step dt (rejects dt above
// spinup_radius); kSupplied takes the k starting states from `supplied`.
Trajectory integrate(const MethodTable& method, const IvpProblem& problem,
                     double dt, int n_steps, Starting starting,
                     std::span<const State> supplied = {},
                     const NewtonOptions& newton = {});

// 0 when the trajectory is monotone; otherwise the largest violation. For
// kNorm measures this is max_n (m_n - max of the previous k measures); for
// kContainment it is the largest measure.
double monotone_measure(const Trajectory& trajectory, int k);

// Largest step in [dt_lo, dt_hi] (to 1e-3 relative, by bisection) for which
// every initial state stays monotone over n_steps steps. Returns 0 if dt_lo
// already fails. Starts by Euler spin-up where that is itself monotone and
// from a constant history otherwise.
double max_monotone_dt(const MethodTable& method, const IvpProblem& problem,
                       double dt_lo, double dt_hi,
                       std::span<const State> initial_states,
                       int n_steps = 1000, double violation_tol = 1e-13);

// min(r * dt_fe, r_second * dt_fe_second).
double guaranteed_step(const SspCertificate& certificate,
                       const IvpProblem& problem);

}  // namespace ssplmm

#endif  // SSPLMM_INTEGRATOR_H_

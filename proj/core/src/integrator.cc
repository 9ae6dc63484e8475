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

#include "ssplmm/integrator.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "dense_lu.h"

namespace ssplmm {

namespace {

double inf_norm(const State& u) {
  double n = 0.0;
  for (double v : u) n = std::max(n, std::abs(v));
  return n;
}

// Weights applied to (F, G) at each history slot and at the new state.
struct OperatorWeights {
  std::vector<double> on_f;       // k+1
  std::vector<double> on_second;  // k+1
};

OperatorWeights weights_for(const MethodTable& method,
                            const IvpProblem& problem) {
  OperatorWeights w;
  w.on_f = method.beta;
  w.on_second.assign(method.k + 1, 0.0);
  switch (method.family) {
    case Family::kClassical:
      if (problem.flavor == ProblemFlavor::kAdditive) w.on_second = method.beta;
      break;
    case Family::kPerturbed:
      if (problem.flavor != ProblemFlavor::kPerturbed) {
        throw std::invalid_argument(
            "perturbed method needs a problem with a downwind operator");
      }
      for (int j = 0; j <= method.k; ++j) w.on_second[j] = -method.beta_second[j];
      break;
    case Family::kAdditive:
      if (problem.flavor != ProblemFlavor::kAdditive) {
        throw std::invalid_argument("additive method needs an additive problem");
      }
      w.on_second = method.beta_second;
      break;
  }
  return w;
}

struct Evaluation {
  State f;
  State second;
};

Evaluation evaluate(const IvpProblem& problem, const State& u, bool need_second) {
  Evaluation e{problem.rhs_f(u), {}};
  if (need_second) e.second = problem.rhs_second(u);
  return e;
}

bool uses_second(const OperatorWeights& w) {
  return std::any_of(w.on_second.begin(), w.on_second.end(),
                     [](double v) { return v != 0.0; });
}

std::vector<double> fd_jacobian(const Operator& op, const State& u,
                                const State& at_u) {
  const std::size_t n = u.size();
  std::vector<double> jac(n * n, 0.0);
  State shifted = u;
  for (std::size_t c = 0; c < n; ++c) {
    const double h = 1e-7 * (1.0 + std::abs(u[c]));
    shifted[c] = u[c] + h;
    const State value = op(shifted);
    shifted[c] = u[c];
    for (std::size_t r = 0; r < n; ++r) jac[r * n + c] = (value[r] - at_u[r]) / h;
  }
  return jac;
}

struct NewtonOutcome {
  State u;
  double residual;
  bool converged;
  int iterations;
};

// Damped Newton on u - dt (cf F(u) + cs G(u)) = target from `guess`.
NewtonOutcome newton_solve(const IvpProblem& problem, const State& target,
                           State guess, double dt, double cf, double cs,
                           const NewtonOptions& options, int max_iterations) {
  const std::size_t n = target.size();
  auto residual_of = [&](const State& u, State* f_out, State* s_out) {
    State f = cf != 0.0 ? problem.rhs_f(u) : State(n, 0.0);
    State s = cs != 0.0 ? problem.rhs_second(u) : State(n, 0.0);
    State g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = u[i] - dt * (cf * f[i] + cs * s[i]) - target[i];
    }
    if (f_out) *f_out = std::move(f);
    if (s_out) *s_out = std::move(s);
    return g;
  };
  const auto converged = [&](const State& u, double g_norm) {
    return std::isfinite(g_norm) &&
           g_norm <= options.tol * std::max(1.0, inf_norm(u));
  };

  State u = std::move(guess);
  State f_at;
  State s_at;
  State g = residual_of(u, &f_at, &s_at);
  double g_norm = inf_norm(g);
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (!std::isfinite(g_norm)) break;
    if (converged(u, g_norm)) return {std::move(u), g_norm, true, iter};

    std::vector<double> jac(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) jac[i * n + i] = 1.0;
    auto accumulate = [&](double c, const JacobianOperator& exact,
                          const Operator& op, const State& at_u) {
      if (c == 0.0) return;
      const std::vector<double> part = exact ? exact(u) : fd_jacobian(op, u, at_u);
      for (std::size_t i = 0; i < n * n; ++i) jac[i] -= dt * c * part[i];
    };
    accumulate(cf, problem.jacobian_f, problem.rhs_f, f_at);
    accumulate(cs, problem.jacobian_second, problem.rhs_second, s_at);

    State rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -g[i];
    auto delta = internal::solve_dense(std::move(jac), std::move(rhs));
    if (!delta) break;

    double lambda = 1.0;
    State trial(n);
    State trial_f;
    State trial_s;
    State trial_g;
    double trial_norm = std::numeric_limits<double>::infinity();
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lambda * (*delta)[i];
      trial_g = residual_of(trial, &trial_f, &trial_s);
      trial_norm = inf_norm(trial_g);
      if (trial_norm < g_norm) break;
      lambda *= 0.5;
    }
    u = trial;
    g = std::move(trial_g);
    g_norm = trial_norm;
    f_at = std::move(trial_f);
    s_at = std::move(trial_s);
  }
  const bool ok = converged(u, g_norm);
  return {std::move(u), g_norm, ok, max_iterations};
}

// Follows the root branch of u - s dt (cf F + cs G)(u) = target from s = 0,
// where u = target, to s = 1.
std::optional<State> continuation_solve(const IvpProblem& problem,
                                        const State& target, double dt,
                                        double cf, double cs,
                                        const NewtonOptions& options) {
  constexpr int kStageIterations = 12;
  constexpr double kMinStage = 1e-6;
  State u = target;
  double s = 0.0;
  double ds = 0.125;
  while (s < 1.0) {
    const double next = std::min(1.0, s + ds);
    NewtonOutcome stage = newton_solve(problem, target, u, next * dt, cf, cs,
                                       options, kStageIterations);
    double jump = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      jump = std::max(jump, std::abs(stage.u[i] - u[i]));
    }
    if (stage.converged && jump <= 0.25 * std::max(1.0, inf_norm(u))) {
      u = std::move(stage.u);
      s = next;
      ds *= 2.0;
    } else {
      ds *= 0.5;
      if (ds < kMinStage) return std::nullopt;
    }
  }
  return u;
}

// Solves u - dt (cf F(u) + cs G(u)) = explicit_part, starting from the
// explicit part. The monotonicity argument for implicit steps covers the root
// on the branch connected to the explicit part; a direct Newton root that
// increases the functional is replaced by the continuation root.
State solve_implicit(const IvpProblem& problem, const State& explicit_part,
                     double dt, double cf, double cs,
                     const NewtonOptions& options) {
  NewtonOutcome direct = newton_solve(problem, explicit_part, explicit_part, dt,
                                      cf, cs, options, options.max_iterations);
  const double bound = problem.functional(explicit_part);
  if (direct.converged && problem.functional(direct.u) <= bound) {
    return std::move(direct.u);
  }
  if (auto branch = continuation_solve(problem, explicit_part, dt, cf, cs, options)) {
    return std::move(*branch);
  }
  if (direct.converged) return std::move(direct.u);
  throw NewtonError("Newton iteration did not converge (residual " +
                        std::to_string(direct.residual) + ")",
                    direct.residual);
}

// Advances one step given the k history states and their evaluations.
State advance(const MethodTable& method, const IvpProblem& problem,
              const OperatorWeights& w, std::span<const State> history,
              std::span<const Evaluation> evals, double dt,
              const NewtonOptions& newton) {
  const std::size_t n = history.front().size();
  State explicit_part(n, 0.0);
  for (int j = 0; j < method.k; ++j) {
    const double a = method.alpha[j];
    const double bf = dt * w.on_f[j];
    const double bs = dt * w.on_second[j];
    for (std::size_t i = 0; i < n; ++i) {
      double v = a * history[j][i];
      if (bf != 0.0) v += bf * evals[j].f[i];
      if (bs != 0.0) v += bs * evals[j].second[i];
      explicit_part[i] += v;
    }
  }
  const double cf = w.on_f[method.k];
  const double cs = w.on_second[method.k];
  if (cf == 0.0 && cs == 0.0) return explicit_part;
  return solve_implicit(problem, explicit_part, dt, cf, cs, newton);
}

void check_history(const MethodTable& method, const IvpProblem& problem,
                   std::span<const State> history) {
  if (static_cast<int>(history.size()) != method.k) {
    throw std::invalid_argument("history must hold exactly k states");
  }
  for (const State& s : history) {
    if (static_cast<int>(s.size()) != problem.dimension) {
      throw std::invalid_argument("history state has the wrong dimension");
    }
  }
}

}  // namespace

void IvpProblem::validate() const {
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (!rhs_f || !functional) {
    throw std::invalid_argument("problem needs rhs_f and a functional");
  }
  if (!rhs_second) throw std::invalid_argument("problem needs rhs_second");
  if (!(dt_fe > 0.0) || !(dt_fe_second > 0.0) || !std::isfinite(dt_fe) ||
      !std::isfinite(dt_fe_second)) {
    throw std::invalid_argument("forward Euler radii must be positive");
  }
  if (static_cast<int>(initial_state.size()) != dimension) {
    throw std::invalid_argument("initial state has the wrong dimension");
  }
}

IvpProblem with_initial_state(IvpProblem problem, State initial_state) {
  problem.initial_state = std::move(initial_state);
  return problem;
}

State step(const MethodTable& method, const IvpProblem& problem,
           std::span<const State> history, double dt,
           const NewtonOptions& newton) {
  method.validate();
  check_history(method, problem, history);
  const OperatorWeights w = weights_for(method, problem);
  const bool need_second = uses_second(w);
  std::vector<Evaluation> evals;
  evals.reserve(history.size());
  for (const State& s : history) evals.push_back(evaluate(problem, s, need_second));
  return advance(method, problem, w, history, evals, dt, newton);
}

double spinup_radius(const IvpProblem& problem) {
  if (problem.flavor == ProblemFlavor::kAdditive) {
    return 1.0 / (1.0 / problem.dt_fe + 1.0 / problem.dt_fe_second);
  }
  return problem.dt_fe;
}

Trajectory integrate(const MethodTable& method, const IvpProblem& problem,
                     double dt, int n_steps, Starting starting,
                     std::span<const State> supplied,
                     const NewtonOptions& newton) {
  method.validate();
  problem.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("dt must be positive and finite");
  }
  if (n_steps < 0) throw std::invalid_argument("n_steps must be nonnegative");
  const OperatorWeights w = weights_for(method, problem);
  const bool need_second = uses_second(w);

  Trajectory out;
  out.dt = dt;
  out.measure_kind = problem.measure_kind;
  out.states.reserve(static_cast<std::size_t>(n_steps) + method.k);

  if (starting == Starting::kSupplied) {
    check_history(method, problem, supplied);
    out.states.assign(supplied.begin(), supplied.end());
  } else {
    if (dt > spinup_radius(problem) * (1.0 + 1e-12)) {
      throw std::invalid_argument(
          "dt exceeds the forward Euler spin-up radius; supply starting values");
    }
    out.states.push_back(problem.initial_state);
    for (int j = 1; j < method.k; ++j) {
      const State& prev = out.states.back();
      State next = problem.rhs_f(prev);
      State extra;
      if (problem.flavor == ProblemFlavor::kAdditive) extra = problem.rhs_second(prev);
      for (std::size_t i = 0; i < next.size(); ++i) {
        next[i] = prev[i] + dt * (next[i] + (extra.empty() ? 0.0 : extra[i]));
      }
      out.states.push_back(std::move(next));
    }
  }

  std::deque<Evaluation> window;
  for (const State& s : out.states) window.push_back(evaluate(problem, s, need_second));
  std::vector<Evaluation> evals(method.k);
  for (int n = 0; n < n_steps; ++n) {
    std::copy(window.begin(), window.end(), evals.begin());
    std::span<const State> history(out.states.data() + n, method.k);
    State next = advance(method, problem, w, history, evals, dt, newton);
    window.pop_front();
    window.push_back(evaluate(problem, next, need_second));
    out.states.push_back(std::move(next));
  }

  out.measures.reserve(out.states.size());
  for (const State& s : out.states) out.measures.push_back(problem.functional(s));
  return out;
}

double monotone_measure(const Trajectory& trajectory, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const std::vector<double>& m = trajectory.measures;
  double worst = 0.0;
  if (trajectory.measure_kind == MeasureKind::kContainment) {
    for (double v : m) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, v);
    }
    return worst;
  }
  for (std::size_t n = static_cast<std::size_t>(k); n < m.size(); ++n) {
    double previous = m[n - k];
    for (std::size_t j = n - k + 1; j < n; ++j) previous = std::max(previous, m[j]);
    if (!std::isfinite(m[n])) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, m[n] - previous);
  }
  return worst;
}

double max_monotone_dt(const MethodTable& method, const IvpProblem& problem,
                       double dt_lo, double dt_hi,
                       std::span<const State> initial_states, int n_steps,
                       double violation_tol) {
  if (!(dt_lo > 0.0) || !(dt_hi >= dt_lo)) {
    throw std::invalid_argument("need 0 < dt_lo <= dt_hi");
  }
  if (initial_states.empty()) {
    throw std::invalid_argument("need at least one initial state");
  }
  const double radius = spinup_radius(problem);
  auto monotone_at = [&](double dt) {
    for (const State& u0 : initial_states) {
      const IvpProblem local = with_initial_state(problem, u0);
      try {
        Trajectory t;
        if (dt <= radius) {
          t = integrate(method, local, dt, n_steps, Starting::kEulerSpinup, {});
        } else {
          const std::vector<State> constant(method.k, u0);
          t = integrate(method, local, dt, n_steps, Starting::kSupplied, constant);
        }
        if (!(monotone_measure(t, method.k) <= violation_tol)) return false;
      } catch (const NewtonError&) {
        return false;
      }
    }
    return true;
  };

  if (!monotone_at(dt_lo)) return 0.0;
  if (monotone_at(dt_hi)) return dt_hi;
  double lo = dt_lo;
  double hi = dt_hi;
  while (hi - lo > 1e-3 * lo) {
    const double mid = 0.5 * (lo + hi);
    (monotone_at(mid) ? lo : hi) = mid;
  }
  return lo;
}

double guaranteed_step(const SspCertificate& certificate,
                       const IvpProblem& problem) {
  if (certificate.unbounded) return std::numeric_limits<double>::infinity();
  return std::min(certificate.r * problem.dt_fe,
                  certificate.r_second * problem.dt_fe_second);
}

}  // namespace ssplmm

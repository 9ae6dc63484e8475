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

#include "ssplmm/problems.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssplmm {

IvpProblem scalar_cubic_problem(double u0) {
  IvpProblem p;
  p.dimension = 1;
  p.flavor = ProblemFlavor::kPerturbed;
  p.rhs_f = [](const State& u) { return State{u[0] * u[0] * (u[0] - 1.0)}; };
  p.rhs_second = p.rhs_f;
  p.jacobian_f = [](const State& u) {
    return std::vector<double>{3.0 * u[0] * u[0] - 2.0 * u[0]};
  };
  p.jacobian_second = p.jacobian_f;
  p.dt_fe = 4.0;
  p.dt_fe_second = 1.0;
  p.functional = containment_violation;
  p.measure_kind = MeasureKind::kContainment;
  p.initial_state = {u0};
  return p;
}

void LeVequeYeeConfig::validate() const {
  if (m < 3) throw std::invalid_argument("LeVeque-Yee grid needs m >= 3");
  if (!(dx > 0.0) || !(mu > 0.0) || !(tau > 0.0)) {
    throw std::invalid_argument("LeVeque-Yee dx, mu and tau must be positive");
  }
}

LeVequeYeeConfig LeVequeYeeConfig::with_grid(int m, double mu_tau) {
  LeVequeYeeConfig c;
  c.m = m;
  c.dx = 1.0 / m;
  c.tau = c.dx;
  c.mu = mu_tau / c.tau;
  return c;
}

double reaction_source(double mu, double u) {
  return -mu * u * (u - 1.0) * (u - 0.5);
}

namespace {

double flux(FluxKind, double u) { return u; }

// Upwind D_i = -(f(u_i) - f(u_{i-1}))/dx; downwind D~_i = -(f(u_{i+1}) - f(u_i))/dx.
State advection(const LeVequeYeeConfig& c, const State& u, bool downwind) {
  const int m = c.m;
  State out(m);
  for (int i = 0; i < m; ++i) {
    const int left = downwind ? i : (i + m - 1) % m;
    const int right = downwind ? (i + 1) % m : i;
    out[i] = -(flux(c.flux, u[right]) - flux(c.flux, u[left])) / c.dx;
  }
  return out;
}

State reaction(const LeVequeYeeConfig& c, const State& u) {
  State out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = reaction_source(c.mu, u[i]);
  return out;
}

std::vector<double> reaction_jacobian(const LeVequeYeeConfig& c, const State& u) {
  const std::size_t m = u.size();
  std::vector<double> jac(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double v = u[i];
    // d/du of -mu (u^3 - 1.5 u^2 + 0.5 u)
    jac[i * m + i] = -c.mu * (3.0 * v * v - 3.0 * v + 0.5);
  }
  return jac;
}

IvpProblem base_problem(const LeVequeYeeConfig& config) {
  config.validate();
  IvpProblem p;
  p.dimension = config.m;
  p.functional = containment_violation;
  p.measure_kind = MeasureKind::kContainment;
  p.initial_state = smoothed_step_profile(config.m);
  return p;
}

}  // namespace

IvpProblem leveque_yee_problem(const LeVequeYeeConfig& config) {
  IvpProblem p = base_problem(config);
  p.flavor = ProblemFlavor::kPerturbed;
  p.rhs_f = [config](const State& u) {
    State d = advection(config, u, false);
    const State s = reaction(config, u);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
    return d;
  };
  p.rhs_second = [config](const State& u) {
    State d = advection(config, u, true);
    const State s = reaction(config, u);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
    return d;
  };
  const std::array<double, 2> up{config.tau, 2.0 / config.mu};
  const std::array<double, 2> down{config.tau, 16.0 / config.mu};
  p.dt_fe = harmonic_step_size(up);
  p.dt_fe_second = harmonic_step_size(down);
  return p;
}

IvpProblem leveque_yee_imex_problem(const LeVequeYeeConfig& config) {
  IvpProblem p = base_problem(config);
  p.flavor = ProblemFlavor::kAdditive;
  p.rhs_f = [config](const State& u) { return advection(config, u, false); };
  p.rhs_second = [config](const State& u) { return reaction(config, u); };
  p.jacobian_second = [config](const State& u) {
    return reaction_jacobian(config, u);
  };
  p.dt_fe = config.tau;
  p.dt_fe_second = 2.0 / config.mu;
  return p;
}

State smoothed_step_profile(int m) {
  if (m < 1) throw std::invalid_argument("profile needs m >= 1");
  constexpr double kWidth = 0.05;
  State u(m);
  for (int i = 0; i < m; ++i) {
    const double x = (i + 0.5) / m;
    const double v =
        0.5 * (std::tanh((x - 0.25) / kWidth) - std::tanh((x - 0.75) / kWidth));
    u[i] = std::clamp(v, 0.0, 1.0);
  }
  return u;
}

double containment_violation(const State& u) {
  double worst = 0.0;
  for (double v : u) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    worst = std::max({worst, v - 1.0, -v});
  }
  return worst;
}

double total_variation(const State& u) {
  double tv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    tv += std::abs(u[(i + 1) % u.size()] - u[i]);
  }
  return tv;
}

double harmonic_step_size(std::span<const double> eps) {
  if (eps.empty()) throw std::invalid_argument("harmonic_step_size needs radii");
  double inverse = 0.0;
  for (double e : eps) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw std::invalid_argument("step-size radii must be positive and finite");
    }
    inverse += 1.0 / e;
  }
  return 1.0 / inverse;
}

}  // namespace ssplmm

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

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssplmm/integrator.h"
#include "ssplmm/optimizer.h"
#include "ssplmm/problems.h"

namespace ssplmm {
namespace {

const MethodTable kDlmm32 = make_method(Family::kPerturbed, {0.5, 0.5},
                                        {0.0, 1.75, 0.0}, {0.25, 0.0, 0.0});
const MethodTable kForwardEuler = make_method(Family::kClassical, {1.0}, {1.0, 0.0});

double cubic(double u) { return u * u * (u - 1.0); }

std::vector<State> u0_grid(int n) {
  std::vector<State> grid;
  for (int i = 1; i <= n; ++i) grid.push_back({static_cast<double>(i) / (n + 1)});
  return grid;
}

// Scalar additive problem u' = F(u) + G(u) with G(u) = -lambda u.
IvpProblem linear_stiff_problem(double lambda) {
  IvpProblem p;
  p.dimension = 1;
  p.flavor = ProblemFlavor::kAdditive;
  p.rhs_f = [](const State& u) { return State{std::sin(u[0])}; };
  p.rhs_second = [lambda](const State& u) { return State{-lambda * u[0]}; };
  p.dt_fe = 1.0;
  p.dt_fe_second = 1.0 / lambda;
  p.functional = [](const State& u) { return std::abs(u[0]); };
  p.measure_kind = MeasureKind::kNorm;
  p.initial_state = {1.0};
  return p;
}

TEST(Step, ExampleHandArithmetic) {
  const IvpProblem problem = scalar_cubic_problem();
  const std::vector<State> history{{0.5}, {0.4}};
  const State next = step(kDlmm32, problem, history, 1.0);
  // 0.5*0.5 - 0.25*F(0.5) + 0.5*0.4 + 1.75*F(0.4).
  const double oracle = 0.25 - 0.25 * cubic(0.5) + 0.2 + 1.75 * cubic(0.4);
  EXPECT_NEAR(next[0], 0.31325, 1e-15);
  EXPECT_NEAR(next[0], oracle, 1e-15);
}

TEST(Step, ConstantHistoryWithZeroOperator) {
  IvpProblem problem = scalar_cubic_problem();
  problem.rhs_f = problem.rhs_second = [](const State& u) {
    return State(u.size(), 0.0);
  };
  const auto m = make_method(Family::kClassical, {0.2, 0.3, 0.5},
                             {0.1, -0.4, 2.0, 0.0});
  const std::vector<State> constant{{0.7}, {0.7}, {0.7}};
  EXPECT_NEAR(step(m, problem, constant, 0.9)[0], 0.7, 1e-15);
  const std::vector<State> varying{{1.0}, {2.0}, {3.0}};
  EXPECT_NEAR(step(m, problem, varying, 0.9)[0], 0.2 + 0.6 + 1.5, 1e-15);
}

TEST(Step, ImexBackwardEulerClosedForm) {
  const double lambda = 50.0;
  const IvpProblem problem = linear_stiff_problem(lambda);
  const auto imex = make_method(Family::kAdditive, {1.0}, {1.0, 0.0}, {0.0, 1.0});
  for (double dt : {0.01, 0.1, 1.0}) {
    for (double u : {-2.0, 0.3, 1.5}) {
      const std::vector<State> history{{u}};
      const double expected = (u + dt * std::sin(u)) / (1.0 + lambda * dt);
      EXPECT_NEAR(step(imex, problem, history, dt)[0], expected, 1e-13);
    }
  }
}

TEST(Step, ImplicitResidualIsWithinNewtonTolerance) {
  const auto result = optimal_method(MethodClass::kClassical, 3, 2, 0.0, false);
  ASSERT_TRUE(result.has_value());
  const MethodTable& m = result->method;
  ASSERT_TRUE(m.is_implicit());
  const IvpProblem problem = scalar_cubic_problem();
  const std::vector<State> history{{0.9}, {0.8}, {0.7}};
  const double dt = 2.0;
  const double u = step(m, problem, history, dt)[0];
  double rhs = dt * m.beta[3] * cubic(u);
  for (int j = 0; j < 3; ++j) {
    rhs += m.alpha[j] * history[j][0] + dt * m.beta[j] * cubic(history[j][0]);
  }
  EXPECT_LE(std::abs(u - rhs), 1e-12);
  EXPECT_GE(u, 0.0);
  EXPECT_LE(u, 1.0);
}

TEST(Step, NoRealRootThrowsNewtonError) {
  IvpProblem problem = scalar_cubic_problem();
  problem.rhs_f = [](const State& u) { return State{u[0] * u[0] + 1.0}; };
  problem.jacobian_f = [](const State& u) { return std::vector<double>{2 * u[0]}; };
  const auto be = make_method(Family::kClassical, {1.0}, {0.0, 1.0});
  const std::vector<State> history{{0.0}};
  EXPECT_THROW(step(be, problem, history, 1.0), NewtonError);
}

TEST(Step, RejectsMismatchedInputs) {
  const IvpProblem problem = scalar_cubic_problem();
  const std::vector<State> short_history{{0.5}};
  EXPECT_THROW(step(kDlmm32, problem, short_history, 1.0), std::invalid_argument);
  const auto additive =
      make_method(Family::kAdditive, {1.0}, {1.0, 0.0}, {0.0, 0.0});
  EXPECT_THROW(step(additive, problem, short_history, 1.0), std::invalid_argument);
  EXPECT_THROW(step(kDlmm32, linear_stiff_problem(1.0),
                    std::vector<State>{{0.1}, {0.1}}, 1.0),
               std::invalid_argument);
}

TEST(Integrate, ExampleStaysInUnitInterval) {
  for (double u0 : {0.1, 0.5, 0.9}) {
    const IvpProblem problem = scalar_cubic_problem(u0);
    const Trajectory t =
        integrate(kDlmm32, problem, 8.0 / 7.0, 1000, Starting::kEulerSpinup);
    ASSERT_EQ(t.states.size(), 1002u);
    for (const State& s : t.states) {
      EXPECT_GE(s[0], 0.0);
      EXPECT_LE(s[0], 1.0);
    }
    EXPECT_EQ(monotone_measure(t, 2), 0.0);
  }
}

TEST(Integrate, FixedPointsArePreserved) {
  for (double u0 : {0.0, 1.0}) {
    const Trajectory t = integrate(kDlmm32, scalar_cubic_problem(u0), 1.0, 200,
                                   Starting::kEulerSpinup);
    for (const State& s : t.states) EXPECT_EQ(s[0], u0);
  }
}

TEST(Integrate, SpinupAndSuppliedStarts) {
  const IvpProblem problem = scalar_cubic_problem(0.5);
  const Trajectory spun = integrate(kDlmm32, problem, 1.0, 0, Starting::kEulerSpinup);
  ASSERT_EQ(spun.states.size(), 2u);
  EXPECT_NEAR(spun.states[1][0], 0.5 + cubic(0.5), 1e-15);

  const std::vector<State> supplied{{0.5}, {0.4}};
  const Trajectory t =
      integrate(kDlmm32, problem, 1.0, 1, Starting::kSupplied, supplied);
  EXPECT_NEAR(t.states.back()[0], 0.31325, 1e-15);
  EXPECT_THROW(integrate(kDlmm32, problem, 4.5, 1, Starting::kEulerSpinup),
               std::invalid_argument);
  EXPECT_THROW(integrate(kDlmm32, problem, 1.0, 1, Starting::kSupplied,
                         std::vector<State>{{0.5}}),
               std::invalid_argument);
  EXPECT_THROW(integrate(kDlmm32, problem, -1.0, 1, Starting::kEulerSpinup),
               std::invalid_argument);
}

TEST(Integrate, AdditiveSpinupUsesBothOperators) {
  const IvpProblem problem = linear_stiff_problem(2.0);
  EXPECT_NEAR(spinup_radius(problem), 1.0 / 3.0, 1e-15);
  const auto m = make_method(Family::kClassical, {0.5, 0.5}, {0.0, 1.5, 0.0});
  const Trajectory t = integrate(m, problem, 0.25, 0, Starting::kEulerSpinup);
  EXPECT_NEAR(t.states[1][0], 1.0 + 0.25 * (std::sin(1.0) - 2.0), 1e-15);
}

Trajectory with_measures(std::vector<double> m, MeasureKind kind) {
  Trajectory t;
  t.dt = 1.0;
  t.measures = std::move(m);
  t.measure_kind = kind;
  return t;
}

TEST(MonotoneMeasure, Examples) {
  EXPECT_EQ(monotone_measure(with_measures({2, 2, 2, 2}, MeasureKind::kNorm), 2), 0.0);
  EXPECT_EQ(monotone_measure(with_measures({1, 0.5, 0.7}, MeasureKind::kNorm), 2), 0.0);
  EXPECT_NEAR(monotone_measure(
                  with_measures({1, 0.5, 0.4, 0.45, 0.55}, MeasureKind::kNorm), 2),
              0.1, 1e-15);
  EXPECT_NEAR(monotone_measure(
                  with_measures({1, 0.5, 0.4, 0.45, 0.55}, MeasureKind::kNorm), 3),
              0.05, 1e-15);
  EXPECT_EQ(monotone_measure(with_measures({0, 0, 0.25, 0}, MeasureKind::kContainment), 2),
            0.25);
  EXPECT_TRUE(std::isinf(monotone_measure(
      with_measures({1, 0.5, NAN}, MeasureKind::kNorm), 2)));
  EXPECT_THROW(monotone_measure(with_measures({1}, MeasureKind::kNorm), 0),
               std::invalid_argument);
}

TEST(MaxMonotoneDt, ReachesExampleBounds) {
  const IvpProblem problem = scalar_cubic_problem();
  const auto grid = u0_grid(33);
  EXPECT_GE(max_monotone_dt(kDlmm32, problem, 0.5, 3.0, grid), 8.0 / 7.0 - 1e-2);
  EXPECT_GE(max_monotone_dt(kForwardEuler, problem, 0.5, 6.0, grid), 4.0 - 1e-2);
  const auto opt = optimal_method(MethodClass::kPerturbed, 2, 2, 4.0, true);
  ASSERT_TRUE(opt.has_value());
  const double empirical = max_monotone_dt(opt->method, problem, 0.5, 3.0, grid);
  EXPECT_GE(empirical, 1.386 - 1e-2);
  EXPECT_GE(empirical, guaranteed_step(opt->certificate, problem));
}

TEST(MaxMonotoneDt, ForwardEulerBoundIsSharp) {
  const IvpProblem problem = scalar_cubic_problem();
  const double dt = max_monotone_dt(kForwardEuler, problem, 0.5, 6.0, u0_grid(33));
  EXPECT_LE(dt, 4.0 * (1 + 2e-3));
}

TEST(MaxMonotoneDt, RejectsBadBracket) {
  const IvpProblem problem = scalar_cubic_problem();
  const auto grid = u0_grid(3);
  EXPECT_THROW(max_monotone_dt(kDlmm32, problem, 0.0, 1.0, grid), std::invalid_argument);
  EXPECT_THROW(max_monotone_dt(kDlmm32, problem, 2.0, 1.0, grid), std::invalid_argument);
  EXPECT_THROW(max_monotone_dt(kDlmm32, problem, 0.5, 1.0, {}), std::invalid_argument);
}

TEST(GuaranteedStep, TakesTheSmallerRadius) {
  const IvpProblem problem = scalar_cubic_problem();
  const auto cert = ssp_coefficient_pair(kDlmm32, problem.y());
  ASSERT_TRUE(cert.has_value());
  // y = 4: r = min(0.5/0.25/4, 0.5/1.75) = 0.5/1.75.
  EXPECT_NEAR(guaranteed_step(*cert, problem), 4.0 * 0.5 / 1.75, 1e-14);
  SspCertificate unbounded;
  unbounded.unbounded = true;
  EXPECT_TRUE(std::isinf(guaranteed_step(unbounded, problem)));
}

TEST(IvpProblem, Validation) {
  IvpProblem p = scalar_cubic_problem();
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.y(), 4.0);
  p.dt_fe = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = scalar_cubic_problem();
  p.initial_state = {0.1, 0.2};
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace ssplmm

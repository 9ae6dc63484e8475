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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "grid_oracle.h"
#include "ssplmm/optimizer.h"

namespace ssplmm {
namespace {

constexpr double kBisectTol = 1e-6;

// LP point (gamma, beta, beta_second) for a table at coefficient r.
std::vector<double> point_for(const MethodTable& m, double r, double y) {
  std::vector<double> x;
  for (int j = 0; j < m.k; ++j) {
    x.push_back(m.alpha[j] - r * m.beta[j] - y * r * m.beta_second[j]);
  }
  x.insert(x.end(), m.beta.begin(), m.beta.end());
  x.insert(x.end(), m.beta_second.begin(), m.beta_second.end());
  return x;
}

bool satisfies(const LpProblem& lp, const std::vector<double>& x) {
  for (double v : x) {
    if (v < -1e-14) return false;
  }
  return relative_residual(lp, x) <= 1e-12;
}

const MethodTable kDlmm32 = make_method(Family::kPerturbed, {0.5, 0.5},
                                        {0.0, 1.75, 0.0}, {0.25, 0.0, 0.0});

TEST(BuildPerturbedLp, Shape) {
  const LpProblem lp = build_perturbed_lp(3, 2, 1.0, 0.5, true);
  EXPECT_EQ(lp.n_rows, 3);
  EXPECT_EQ(lp.n_cols, 3 * 3 + 2);
  EXPECT_EQ(lp.rhs, (std::vector<double>{1, 3, 9}));
}

TEST(BuildPerturbedLp, ZeroCoefficientDecouplesFirstRow) {
  const LpProblem lp = build_perturbed_lp(2, 2, 1.0, 0.0, true);
  EXPECT_EQ(lp.at(0, 0), 1.0);
  EXPECT_EQ(lp.at(0, 1), 1.0);
  for (int col = 2; col < lp.n_cols; ++col) EXPECT_EQ(lp.at(0, col), 0.0);
  EXPECT_EQ(lp.rhs[0], 1.0);
}

TEST(BuildPerturbedLp, ExplicitZeroesImplicitColumns) {
  const LpProblem lp = build_perturbed_lp(2, 2, 1.0, 0.3, true);
  for (int row = 0; row < lp.n_rows; ++row) {
    EXPECT_EQ(lp.at(row, 2 + 2), 0.0);  // beta_k
    EXPECT_EQ(lp.at(row, 5 + 2), 0.0);  // beta_second_k
  }
}

TEST(BuildPerturbedLp, ExampleTableAtItsCoefficient) {
  const LpProblem at = build_perturbed_lp(2, 2, 1.0, 2.0 / 7.0, true);
  EXPECT_TRUE(satisfies(at, point_for(kDlmm32, 2.0 / 7.0, 1.0)));
  // At r = 1/2 the same weights force gamma_1 = 1/2 - 7/8 < 0.
  const auto x = point_for(kDlmm32, 0.5, 1.0);
  EXPECT_LT(x[1], 0.0);
  const LpProblem above = build_perturbed_lp(2, 2, 1.0, 0.5, true);
  EXPECT_LE(relative_residual(above, x), 1e-12);
}

TEST(BuildPerturbedLp, ForwardEuler) {
  const LpProblem lp = build_perturbed_lp(1, 1, 0.0, 1.0, true);
  const auto sol = solve_feasibility(lp);
  ASSERT_TRUE(sol.has_value());
  EXPECT_NEAR(sol->x[0], 0.0, 1e-12);
  EXPECT_NEAR(sol->x[1], 1.0, 1e-12);
}

TEST(BuildAdditiveLp, Examples) {
  const LpProblem fe = build_additive_lp(1, 1, 0.0, 1.0, true);
  EXPECT_EQ(fe.n_rows, 3);
  EXPECT_TRUE(satisfies(fe, {0.0, 1.0, 0.0, 1.0, 0.0}));
  // Forward Euler on F + G has r (1 + y) = 1.
  const double y = 0.7;
  EXPECT_TRUE(satisfies(build_additive_lp(1, 1, y, 1.0 / (1.0 + y), true),
                        {0.0, 1.0, 0.0, 1.0, 0.0}));
  EXPECT_FALSE(solve_feasibility(build_additive_lp(1, 1, y, 1.01 / (1.0 + y), true)));
  EXPECT_FALSE(solve_feasibility(build_additive_lp(2, 2, 1.0, 0.25, true)));
  EXPECT_TRUE(solve_feasibility(build_additive_lp(4, 2, 1.0, 1.0 / 3.0, true)));
  EXPECT_EQ(build_additive_lp(4, 3, 1.0, 0.1, true).n_rows, 2 * 3 + 1);
}

TEST(BuildImexLp, Examples) {
  const LpProblem lp = build_imex_lp(1, 1, 2.0, 1.0);
  EXPECT_EQ(lp.n_cols, 3 * 1 + 1);
  EXPECT_TRUE(satisfies(lp, {0.0, 1.0, 0.0, 1.0}));
  for (double r : {0.0, 0.5, 1.0, 2.0}) {
    EXPECT_FALSE(solve_feasibility(build_imex_lp(1, 2, 1.0, r)).has_value())
        << "r = " << r;
  }
}

TEST(BuildImexLp, RegionBoundaryIsSharp) {
  const auto best = optimal_method(MethodClass::kImex, 3, 2, 1.0, false);
  ASSERT_TRUE(best.has_value());
  const double c = best->certificate.r;
  EXPECT_TRUE(solve_feasibility(build_imex_lp(3, 2, 1.0, c - 1e-5)));
  EXPECT_FALSE(solve_feasibility(build_imex_lp(3, 2, 1.0, c + 1e-5)));
}

struct Expected {
  MethodClass kind;
  int k, p;
  double y;
  double value, tol;
};

class OptimalValues : public ::testing::TestWithParam<Expected> {};

TEST_P(OptimalValues, MatchesReference) {
  const Expected e = GetParam();
  const auto result = optimal_method(e.kind, e.k, e.p, e.y, true);
  ASSERT_TRUE(result.has_value());
  EXPECT_NEAR(result->certificate.r, e.value, e.tol);
  EXPECT_TRUE(satisfies_order(result->method, e.p));
  double alpha_sum = 0.0;
  for (double a : result->method.alpha) alpha_sum += a;
  EXPECT_NEAR(alpha_sum, 1.0, 1e-10);
  EXPECT_TRUE(verify_nonzero_bound(*result));
}

INSTANTIATE_TEST_SUITE_P(
    Reference, OptimalValues,
    ::testing::Values(
        Expected{MethodClass::kPerturbed, 2, 2, 4.0, 0.3465, 1e-3},
        Expected{MethodClass::kPerturbed, 2, 2, 1.0, 0.5, 1e-3},
        Expected{MethodClass::kPerturbed, 2, 2, 25.0 / 32.0, 0.5239, 2e-3},
        Expected{MethodClass::kClassical, 1, 1, 0.0, 1.0, kBisectTol},
        Expected{MethodClass::kClassical, 3, 2, 0.0, 0.5, kBisectTol},
        Expected{MethodClass::kClassical, 4, 2, 0.0, 2.0 / 3.0, kBisectTol},
        Expected{MethodClass::kClassical, 4, 3, 0.0, 1.0 / 3.0, kBisectTol},
        Expected{MethodClass::kAdditive, 4, 2, 1.0, 1.0 / 3.0, 1e-3}));

TEST(OptimalMethod, NoClassicalTwoStepSecondOrder) {
  EXPECT_FALSE(optimal_method(MethodClass::kClassical, 2, 2, 0.0, true));
}

TEST(OptimalMethod, ImplicitFirstOrderHitsBracketCap) {
  OptimizerOptions options;
  options.r_cap = 1e3;
  EXPECT_THROW(
      optimal_method(MethodClass::kClassical, 1, 1, 0.0, false, options),
      BracketCapError);
}

TEST(OptimalMethod, RejectsBadArguments) {
  EXPECT_THROW(optimal_method(MethodClass::kPerturbed, 0, 2, 1.0, true),
               std::invalid_argument);
  EXPECT_THROW(optimal_method(MethodClass::kPerturbed, 2, 0, 1.0, true),
               std::invalid_argument);
  EXPECT_THROW(optimal_method(MethodClass::kPerturbed, 2, 2, -1.0, true),
               std::invalid_argument);
}

TEST(OptimalMethod, CertificateIsTheTablesOwnCoefficient) {
  for (double y : {0.0, 0.5, 2.0}) {
    const auto result = optimal_method(MethodClass::kPerturbed, 4, 3, y, true);
    ASSERT_TRUE(result.has_value());
    const auto own = ssp_coefficient_pair(result->method, y);
    ASSERT_TRUE(own.has_value());
    EXPECT_LE(result->certificate.r, own->r);
    EXPECT_NEAR(result->certificate.r, own->r, 1e-12);
    EXPECT_LE(result->bisection_gap, kBisectTol);
  }
}

// Independent of the simplex engine: enumeration of all bases.
TEST(OptimalMethod, ClassicalMatchesEnumerationOracle) {
  for (int k = 2; k <= 6; ++k) {
    for (int p = 2; p <= 3; ++p) {
      for (bool implicit : {false, true}) {
        const double oracle =
            testing::enumerate_classical_coefficient(k, p, implicit);
        const auto result =
            optimal_method(MethodClass::kClassical, k, p, 0.0, !implicit);
        const double c = result ? result->certificate.r : 0.0;
        EXPECT_NEAR(c, oracle, 2 * kBisectTol)
            << "k=" << k << " p=" << p << " implicit=" << implicit;
      }
    }
  }
}

TEST(OptimalMethod, ClassicalThreeStepMatchesGridOracle) {
  const auto result = optimal_method(MethodClass::kClassical, 3, 2, 0.0, true);
  ASSERT_TRUE(result.has_value());
  EXPECT_NEAR(result->certificate.r, testing::grid_search_classical_order2(3),
              1e-3);
}

TEST(OptimalMethod, LargeYApproachesClassical) {
  for (int k = 3; k <= 6; ++k) {
    for (int p = 2; p <= 3; ++p) {
      const auto classical =
          optimal_method(MethodClass::kClassical, k, p, 0.0, true);
      if (!classical) continue;
      const auto perturbed =
          optimal_method(MethodClass::kPerturbed, k, p, 1e3, true);
      ASSERT_TRUE(perturbed.has_value());
      EXPECT_NEAR(perturbed->certificate.r, classical->certificate.r, 1e-3)
          << "k=" << k << " p=" << p;
    }
  }
}

TEST(OptimalMethod, FeasibleSetIsAnIntervalFromZero) {
  for (MethodClass kind :
       {MethodClass::kPerturbed, MethodClass::kAdditive, MethodClass::kImex}) {
    for (int k = 2; k <= 6; ++k) {
      const bool explicit_flag = kind != MethodClass::kImex;
      const auto result = optimal_method(kind, k, 2, 1.0, explicit_flag);
      if (!result) continue;
      const double c = result->certificate.r;
      for (double fraction : {0.5, 0.25, 0.0}) {
        EXPECT_TRUE(solve_feasibility(
            build_lp(kind, k, 2, 1.0, fraction * c, explicit_flag)))
            << to_string(kind) << " k=" << k << " r=" << fraction * c;
      }
    }
  }
}

TEST(OptimalMethod, ImexTablesHaveStatedOrder) {
  for (auto [k, p] : {std::pair{3, 2}, std::pair{4, 3}, std::pair{6, 4}}) {
    const auto result = optimal_method(MethodClass::kImex, k, p, 1.0, false);
    ASSERT_TRUE(result.has_value()) << k << "," << p;
    EXPECT_EQ(result->method.family, Family::kAdditive);
    EXPECT_EQ(result->method.beta[k], 0.0);
    EXPECT_LE(max_abs(order_residuals(result->method, p)), kOrderTolerance);
    EXPECT_TRUE(verify_nonzero_bound(*result));
  }
}

TEST(OptimalMethod, ImexTwoStepSecondOrderDoesNotExist) {
  for (double y : {0.1, 1.0, 10.0}) {
    EXPECT_FALSE(optimal_method(MethodClass::kImex, 2, 2, y, false));
  }
}

TEST(RegionScan, SinglePoint) {
  const std::vector<double> grid{1.0};
  const auto samples = region_scan(MethodClass::kPerturbed, 2, 2, grid, true);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].y, 1.0);
  EXPECT_NEAR(samples[0].c, 0.5, 1e-3);
  EXPECT_NEAR(samples[0].c_second, 0.5, 1e-3);
}

TEST(RegionScan, MonotoneColumnsAndThreadIndependence) {
  const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
  const auto one = region_scan(MethodClass::kPerturbed, 2, 2, grid, true, {}, 1);
  const auto four = region_scan(MethodClass::kPerturbed, 2, 2, grid, true, {}, 4);
  ASSERT_EQ(one.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(one[i].c, four[i].c);
    EXPECT_EQ(one[i].c_second, four[i].c_second);
    if (i > 0) {
      EXPECT_LE(one[i].c, one[i - 1].c + 1e-8);
      EXPECT_GE(one[i].c_second, one[i - 1].c_second - 1e-8);
    }
  }
}

TEST(RegionScan, ZeroSamplesAreKept) {
  const std::vector<double> grid{0.5, 1.0};
  const auto samples = region_scan(MethodClass::kImex, 2, 2, grid, false);
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].c, 0.0);
  EXPECT_EQ(samples[1].c, 0.0);
}

TEST(RegionScan, RejectsUnsortedGrid) {
  const std::vector<double> grid{1.0, 0.5};
  EXPECT_THROW(region_scan(MethodClass::kPerturbed, 2, 2, grid, true),
               std::invalid_argument);
}

TEST(AdditiveBetaEquality, Examples) {
  const auto a = optimal_method(MethodClass::kAdditive, 3, 2, 1.0, true);
  ASSERT_TRUE(a.has_value());
  EXPECT_TRUE(verify_additive_beta_equality(*a));

  const auto fe = optimal_method(MethodClass::kAdditive, 1, 1, 0.0, true);
  ASSERT_TRUE(fe.has_value());
  EXPECT_TRUE(verify_additive_beta_equality(*fe));

  const auto b = optimal_method(MethodClass::kAdditive, 6, 3, 2.0, true);
  const auto c = optimal_method(MethodClass::kClassical, 6, 3, 0.0, true);
  ASSERT_TRUE(b && c);
  EXPECT_NEAR(b->certificate.r * 3.0, c->certificate.r, 3 * kBisectTol);
  EXPECT_TRUE(verify_additive_beta_equality(*b));
}

TEST(NonzeroBound, Examples) {
  const auto a = optimal_method(MethodClass::kPerturbed, 2, 2, 1.0, true);
  ASSERT_TRUE(a.has_value());
  EXPECT_TRUE(verify_nonzero_bound(*a));
  EXPECT_LE(a->nonzero_count, 2);
  const auto fe = optimal_method(MethodClass::kClassical, 1, 1, 0.0, true);
  EXPECT_TRUE(verify_nonzero_bound(*fe));
  const auto b = optimal_method(MethodClass::kPerturbed, 6, 4, 1.0, true);
  ASSERT_TRUE(b.has_value());
  EXPECT_TRUE(verify_nonzero_bound(*b));
}

TEST(ResultForTable, WrapsExampleTable) {
  const auto wrapped =
      result_for_table(MethodClass::kPerturbed, kDlmm32, 2, 1.0);
  ASSERT_TRUE(wrapped.has_value());
  EXPECT_NEAR(wrapped->certificate.r, 2.0 / 7.0, 1e-15);
  // Not optimal: gamma_0, beta_1 and beta_second_0 are all positive.
  EXPECT_EQ(positive_support(wrapped->lp_point, 1e-10), 3);
  EXPECT_FALSE(verify_nonzero_bound(*wrapped));
  const auto lmm32 =
      make_method(Family::kClassical, {0.5, 0.5}, {-0.25, 1.75, 0.0});
  EXPECT_FALSE(result_for_table(MethodClass::kClassical, lmm32, 2, 0.0));
  EXPECT_THROW(result_for_table(MethodClass::kAdditive, kDlmm32, 2, 1.0),
               std::invalid_argument);
}

// Re-solves the LP at r = C - offset with the columns shuffled; the simplex
// then visits bases in a different order. Near a unique optimum the feasible
// set shrinks to a point, so the spread of the restarts is proportional to
// the offset; two optimal vertices would keep it O(1).
double restart_spread(const OptimalMethodResult& result, int restarts,
                      double offset) {
  const double r = result.certificate.r - offset;
  const LpProblem lp =
      build_lp(result.kind, result.k, result.p, result.y, r, result.explicit_flag);
  std::mt19937 rng(11);
  std::vector<std::vector<double>> methods;
  for (int t = 0; t < restarts; ++t) {
    std::vector<int> perm(lp.n_cols);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    LpProblem shuffled = lp;
    for (int row = 0; row < lp.n_rows; ++row) {
      for (int c = 0; c < lp.n_cols; ++c) shuffled.at(row, c) = lp.at(row, perm[c]);
    }
    const auto sol = solve_feasibility(shuffled);
    if (!sol) return INFINITY;
    std::vector<double> x(lp.n_cols);
    for (int c = 0; c < lp.n_cols; ++c) x[perm[c]] = sol->x[c];
    const MethodTable m =
        method_from_lp_point(result.kind, result.k, result.y, r, x);
    std::vector<double> flat = m.alpha;
    for (int j = 0; j <= m.k; ++j) flat.push_back(m.beta[j] - m.beta_second[j]);
    methods.push_back(flat);
  }
  double spread = 0.0;
  for (const auto& a : methods) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      spread = std::max(spread, std::abs(a[i] - methods[0][i]));
    }
  }
  return spread;
}

TEST(Uniqueness, AgreesWithRandomRestarts) {
  for (auto [k, p, y] : {std::tuple{2, 2, 1.0}, std::tuple{3, 2, 1.0},
                         std::tuple{2, 2, 4.0}, std::tuple{4, 3, 2.0}}) {
    const auto result = optimal_method(MethodClass::kPerturbed, k, p, y, true);
    ASSERT_TRUE(result.has_value());
    if (positive_support(result->lp_point, 1e-10) != p) continue;
    if (uniqueness_test(*result) != Uniqueness::kUnique) continue;
    const double coarse = restart_spread(*result, 20, 1e-6);
    const double fine = restart_spread(*result, 20, 1e-8);
    EXPECT_LE(fine, 1e-6) << k << "," << p << "," << y;
    EXPECT_LE(fine, 0.02 * coarse + 1e-12) << k << "," << p << "," << y;
  }
}

TEST(Uniqueness, RejectsWrongSupport) {
  auto result = optimal_method(MethodClass::kPerturbed, 2, 2, 1.0, true);
  ASSERT_TRUE(result.has_value());
  std::fill(result->lp_point.begin(), result->lp_point.end(), 0.0);
  EXPECT_THROW(uniqueness_test(*result), std::invalid_argument);
  auto additive = optimal_method(MethodClass::kAdditive, 3, 2, 1.0, true);
  ASSERT_TRUE(additive.has_value());
  EXPECT_THROW(uniqueness_test(*additive), std::invalid_argument);
}

TEST(MethodClass, NamesRoundTrip) {
  for (MethodClass c : {MethodClass::kClassical, MethodClass::kPerturbed,
                        MethodClass::kAdditive, MethodClass::kImex}) {
    EXPECT_EQ(parse_method_class(to_string(c)), c);
  }
  EXPECT_FALSE(parse_method_class("downwind").has_value());
}

}  // namespace
}  // namespace ssplmm

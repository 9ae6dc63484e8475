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

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ssplmm/integrator.h"
#include "ssplmm/lp_solver.h"
#include "ssplmm/optimizer.h"
#include "ssplmm/problems.h"

namespace ssplmm {
namespace {

void BM_FeasibilityLp(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const LpProblem lp = build_perturbed_lp(k, p, 1.0, 0.1, true);
  for (auto _ : state) benchmark::DoNotOptimize(solve_feasibility(lp));
}
BENCHMARK(BM_FeasibilityLp)->Args({2, 2})->Args({10, 4})->Args({40, 10});

void BM_OptimalPerturbed(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_method(MethodClass::kPerturbed, k, p, 1.0, true));
  }
}
BENCHMARK(BM_OptimalPerturbed)
    ->Args({2, 2})
    ->Args({10, 4})
    ->Args({20, 8})
    ->Unit(benchmark::kMillisecond);

void BM_OptimalImex(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_method(MethodClass::kImex, 6, 4, 1.0, false));
  }
}
BENCHMARK(BM_OptimalImex)->Unit(benchmark::kMillisecond);

void BM_RegionScan(benchmark::State& state) {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.05 * std::pow(400.0, i / 19.0));
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        region_scan(MethodClass::kPerturbed, 4, 3, grid, true, {}, threads));
  }
}
BENCHMARK(BM_RegionScan)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_IntegrateCubic(benchmark::State& state) {
  const auto method = make_method(Family::kPerturbed, {0.5, 0.5}, {0.0, 1.75, 0.0},
                                  {0.25, 0.0, 0.0});
  const IvpProblem problem = scalar_cubic_problem(0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate(method, problem, 1.0, 1000, Starting::kEulerSpinup));
  }
}
BENCHMARK(BM_IntegrateCubic);

void BM_IntegrateImexLeVequeYee(benchmark::State& state) {
  const auto result = optimal_method(MethodClass::kImex, 3, 2, 1.0 / 3.0, false);
  const auto config = LeVequeYeeConfig::with_grid(static_cast<int>(state.range(0)),
                                                  2.0 / 3.0);
  const IvpProblem problem = leveque_yee_imex_problem(config);
  const double dt = guaranteed_step(result->certificate, problem);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate(result->method, problem, dt, 100, Starting::kEulerSpinup));
  }
}
BENCHMARK(BM_IntegrateImexLeVequeYee)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ssplmm

BENCHMARK_MAIN();

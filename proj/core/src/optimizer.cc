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

#include "ssplmm/optimizer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "dense_lu.h"
#include "numeric.h"

namespace ssplmm {

using internal::dpow;
using internal::flush;
using internal::ipow;

std::string_view to_string(MethodClass kind) {
  switch (kind) {
    case MethodClass::kClassical:
      return "classical";
    case MethodClass::kPerturbed:
      return "perturbed";
    case MethodClass::kAdditive:
      return "additive";
    case MethodClass::kImex:
      return "imex";
  }
  return "unknown";
}

std::optional<MethodClass> parse_method_class(std::string_view name) {
  if (name == "classical") return MethodClass::kClassical;
  if (name == "perturbed") return MethodClass::kPerturbed;
  if (name == "additive") return MethodClass::kAdditive;
  if (name == "imex") return MethodClass::kImex;
  return std::nullopt;
}

namespace {

void check_sizes(int k, int p, double y, double r) {
  if (k < 1 || k > kMaxSteps) {
    throw std::invalid_argument("number of steps must lie in [1, 64]");
  }
  if (p < 1) throw std::invalid_argument("order must be at least 1");
  if (!(y >= 0.0) || !std::isfinite(y)) {
    throw std::invalid_argument("y must be finite and nonnegative");
  }
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("r must be finite and nonnegative");
  }
}

// Shared body of the classical and perturbed builders.
LpProblem upwind_downwind_lp(int k, int p, double y, double r,
                             bool explicit_flag, bool with_downwind) {
  check_sizes(k, p, y, r);
  const double r_second = y * r;
  LpProblem lp = LpProblem::zeros(p + 1, 3 * k + 2);
  const int beta0 = k;
  const int beta_second0 = 2 * k + 1;
  for (int i = 0; i <= p; ++i) {
    lp.rhs[i] = ipow(k, i);
    for (int j = 0; j < k; ++j) {
      const double moment = ipow(j, i);
      const double slope = dpow(j, i);
      lp.at(i, j) = moment;
      lp.at(i, beta0 + j) = r * moment + slope;
      if (with_downwind) lp.at(i, beta_second0 + j) = r_second * moment - slope;
    }
    if (!explicit_flag) {
      lp.at(i, beta0 + k) = dpow(k, i);
      if (with_downwind) lp.at(i, beta_second0 + k) = -dpow(k, i);
    }
  }
  return lp;
}

}  // namespace

LpProblem build_classical_lp(int k, int p, double r, bool explicit_flag) {
  return upwind_downwind_lp(k, p, 0.0, r, explicit_flag, false);
}

LpProblem build_perturbed_lp(int k, int p, double y, double r,
                             bool explicit_flag) {
  return upwind_downwind_lp(k, p, y, r, explicit_flag, true);
}

LpProblem build_additive_lp(int k, int p, double y, double r,
                            bool explicit_flag) {
  check_sizes(k, p, y, r);
  const double r_hat = y * r;
  // Rows 0..p: F-side conditions; rows p+1..2p: conditions of orders 1..p on
  // the second term (the zeroth-order row is shared).
  LpProblem lp = LpProblem::zeros(2 * p + 1, 3 * k + 2);
  const int beta0 = k;
  const int hat0 = 2 * k + 1;
  for (int i = 0; i <= p; ++i) {
    lp.rhs[i] = ipow(k, i);
    for (int j = 0; j < k; ++j) {
      const double moment = ipow(j, i);
      lp.at(i, j) = moment;
      lp.at(i, beta0 + j) = r * moment + dpow(j, i);
      lp.at(i, hat0 + j) = r_hat * moment;
    }
    if (!explicit_flag) lp.at(i, beta0 + k) = dpow(k, i);
  }
  for (int i = 1; i <= p; ++i) {
    const int row = p + i;
    lp.rhs[row] = ipow(k, i);
    for (int j = 0; j < k; ++j) {
      const double moment = ipow(j, i);
      lp.at(row, j) = moment;
      lp.at(row, beta0 + j) = r * moment;
      lp.at(row, hat0 + j) = r_hat * moment + dpow(j, i);
    }
    if (!explicit_flag) lp.at(row, hat0 + k) = dpow(k, i);
  }
  return lp;
}

LpProblem build_imex_lp(int k, int p, double y, double r) {
  check_sizes(k, p, y, r);
  const double r_hat = y * r;
  // Rows 0..p: combined order conditions of the explicit weights.
  // Rows p+1..2p: coupling sum_j (beta_j - beta_hat_j) j^i - beta_hat_k k^i = 0
  // for i = 0..p-1, which carries the order conditions to the implicit side.
  LpProblem lp = LpProblem::zeros(2 * p + 1, 3 * k + 1);
  const int beta0 = k;
  const int hat0 = 2 * k;
  for (int i = 0; i <= p; ++i) {
    lp.rhs[i] = ipow(k, i);
    for (int j = 0; j < k; ++j) {
      const double moment = ipow(j, i);
      lp.at(i, j) = moment;
      lp.at(i, beta0 + j) = r * moment + dpow(j, i);
      lp.at(i, hat0 + j) = r_hat * moment;
    }
  }
  for (int i = 0; i < p; ++i) {
    const int row = p + 1 + i;
    for (int j = 0; j < k; ++j) {
      lp.at(row, beta0 + j) = ipow(j, i);
      lp.at(row, hat0 + j) = -ipow(j, i);
    }
    lp.at(row, hat0 + k) = -ipow(k, i);
  }
  return lp;
}

LpProblem build_lp(MethodClass kind, int k, int p, double y, double r,
                   bool explicit_flag) {
  switch (kind) {
    case MethodClass::kClassical:
      return build_classical_lp(k, p, r, explicit_flag);
    case MethodClass::kPerturbed:
      return build_perturbed_lp(k, p, y, r, explicit_flag);
    case MethodClass::kAdditive:
      return build_additive_lp(k, p, y, r, explicit_flag);
    case MethodClass::kImex:
      return build_imex_lp(k, p, y, r);
  }
  throw std::invalid_argument("unknown method class");
}

MethodTable method_from_lp_point(MethodClass kind, int k, double y, double r,
                                 std::span<const double> point) {
  const double r_second = y * r;
  MethodTable method;
  method.k = k;
  method.alpha.assign(k, 0.0);
  method.beta.assign(k + 1, 0.0);
  method.beta_second.assign(k + 1, 0.0);

  const bool imex = kind == MethodClass::kImex;
  const std::size_t expected = imex ? 3 * k + 1 : 3 * k + 2;
  if (point.size() != expected) {
    throw std::invalid_argument("LP point has the wrong length");
  }
  const int second0 = imex ? 2 * k : 2 * k + 1;
  for (int j = 0; j <= k; ++j) {
    if (j < k || !imex) method.beta[j] = flush(point[k + j]);
    method.beta_second[j] = flush(point[second0 + j]);
  }
  if (kind == MethodClass::kClassical) {
    std::fill(method.beta_second.begin(), method.beta_second.end(), 0.0);
  }
  for (int j = 0; j < k; ++j) {
    method.alpha[j] = flush(point[j] + r * method.beta[j] +
                            r_second * method.beta_second[j]);
  }
  switch (kind) {
    case MethodClass::kClassical:
      method.family = Family::kClassical;
      break;
    case MethodClass::kPerturbed:
      method.family = Family::kPerturbed;
      break;
    case MethodClass::kAdditive:
    case MethodClass::kImex:
      method.family = Family::kAdditive;
      break;
  }
  method.explicit_flag = !method.is_implicit();
  method.validate();
  return method;
}

namespace {

// Basic solution of a fixed basis as a function of r, solved in extended
// precision: moment rows reach k^p, so double elimination alone leaves
// absolute order residuals far above the order tolerance.
std::optional<std::vector<double>> basic_point(const LpProblem& lp,
                                               const LpSolution& basis) {
  using Real = long double;
  const std::size_t size = basis.rows.size();
  std::vector<Real> matrix(size * size);
  std::vector<Real> rhs(size);
  for (std::size_t a = 0; a < size; ++a) {
    const int row = basis.rows[a];
    Real largest = 0;
    for (std::size_t c = 0; c < size; ++c) {
      largest = std::max<Real>(largest, std::abs(lp.at(row, basis.basis[c])));
    }
    const Real scale = largest > 0 ? 1 / largest : 1;
    rhs[a] = lp.rhs[row] * scale;
    for (std::size_t c = 0; c < size; ++c) {
      matrix[a * size + c] = lp.at(row, basis.basis[c]) * scale;
    }
  }
  auto xb = internal::solve_dense(std::move(matrix), std::move(rhs));
  if (!xb) return std::nullopt;
  std::vector<double> x(lp.n_cols, 0.0);
  for (std::size_t c = 0; c < size; ++c) {
    x[basis.basis[c]] = static_cast<double>((*xb)[c]);
  }
  return x;
}

using Extended = long double;

// Minimum-norm solution of the consistent m x n system A d = rhs, via
// (A A^T) z = rhs and d = A^T z. Dependent rows are skipped by full pivoting
// with a relative threshold.
std::vector<Extended> min_norm_correction(const std::vector<Extended>& a,
                                          std::size_t m, std::size_t n,
                                          std::vector<Extended> rhs) {
  std::vector<Extended> gram(m * m, 0.0L);
  Extended largest = 0.0L;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t s = 0; s < m; ++s) {
      Extended sum = 0.0L;
      for (std::size_t c = 0; c < n; ++c) sum += a[r * n + c] * a[s * n + c];
      gram[r * m + s] = sum;
      largest = std::max(largest, std::abs(sum));
    }
  }
  std::vector<bool> row_used(m, false);
  std::vector<bool> col_used(m, false);
  std::vector<std::pair<std::size_t, std::size_t>> pivots;
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t br = m;
    std::size_t bc = m;
    Extended best = 0.0L;
    for (std::size_t r = 0; r < m; ++r) {
      if (row_used[r]) continue;
      for (std::size_t c = 0; c < m; ++c) {
        if (!col_used[c] && std::abs(gram[r * m + c]) > best) {
          best = std::abs(gram[r * m + c]);
          br = r;
          bc = c;
        }
      }
    }
    if (br == m || best <= 1e-15L * largest) break;
    row_used[br] = true;
    col_used[bc] = true;
    pivots.emplace_back(br, bc);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == br) continue;
      const Extended f = gram[r * m + bc] / gram[br * m + bc];
      if (f == 0.0L) continue;
      for (std::size_t c = 0; c < m; ++c) gram[r * m + c] -= f * gram[br * m + c];
      rhs[r] -= f * rhs[br];
    }
  }
  std::vector<Extended> z(m, 0.0L);
  for (const auto& [r, c] : pivots) z[c] = rhs[r] / gram[r * m + c];
  std::vector<Extended> d(n, 0.0L);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < m; ++r) d[c] += a[r * n + c] * z[r];
  }
  return d;
}

// Re-solves A(r) x = b on the positive support of x in extended precision,
// with r as an extra unknown (A is affine in r). Zero entries stay zero, so
// the point keeps its vertex structure; at a degenerate vertex the support is
// one column short and the system pins r to the exact optimum.
void refine_vertex(const LpProblem& at_zero, const LpProblem& at_one, double& r,
                   std::vector<double>& x) {
  std::vector<int> support;
  for (int j = 0; j < at_zero.n_cols; ++j) {
    if (x[j] != 0.0) support.push_back(j);
  }
  if (support.empty()) return;
  const std::size_t m = at_zero.n_rows;
  const std::size_t n = support.size() + 1;
  Extended rr = r;
  std::vector<Extended> xs(support.size());
  for (std::size_t c = 0; c < support.size(); ++c) xs[c] = x[support[c]];
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<Extended> a(m * n);
    std::vector<Extended> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      Extended sum = at_zero.rhs[i];
      Extended slope = 0.0L;
      for (std::size_t c = 0; c < support.size(); ++c) {
        const Extended base = at_zero.at(i, support[c]);
        const Extended d = static_cast<Extended>(at_one.at(i, support[c])) - base;
        a[i * n + c] = base + rr * d;
        sum -= a[i * n + c] * xs[c];
        slope += d * xs[c];
      }
      a[i * n + support.size()] = slope;
      rhs[i] = sum;
    }
    const std::vector<Extended> d = min_norm_correction(a, m, n, std::move(rhs));
    for (std::size_t c = 0; c < support.size(); ++c) xs[c] += d[c];
    rr += d[support.size()];
  }
  r = static_cast<double>(rr);
  for (std::size_t c = 0; c < support.size(); ++c) {
    x[support[c]] = static_cast<double>(xs[c]);
  }
}

struct Polished {
  double r;
  std::vector<double> point;
};

// Follows the basis found at `lo` to the largest coefficient at which its
// basic solution is still nonnegative, i.e. where its first basic variable
// reaches zero. That point is a vertex of the optimal face, so it carries one
// positive entry fewer than a generic basic solution below the optimum.
Polished polish(MethodClass kind, int k, int p, double y, bool explicit_flag,
                double lo, double hi, const LpSolution& at_lo,
                const LpOptions& lp_options) {
  constexpr double kNegativeSlack = 1e-12;
  const auto valid = [&](double r) -> std::optional<std::vector<double>> {
    const LpProblem lp = build_lp(kind, k, p, y, r, explicit_flag);
    auto x = basic_point(lp, at_lo);
    if (!x) return std::nullopt;
    for (double v : *x) {
      if (v < -kNegativeSlack) return std::nullopt;
    }
    return x;
  };

  Polished fallback{lo, at_lo.x};
  auto best = valid(lo);
  double good = lo;
  double bad = hi;
  if (!best) {
    // The basis at lo is only feasible within the LP tolerance; its vertex
    // lies just below lo, where the offending basic variable reaches zero.
    const double limit = std::max(16.0 * (hi - lo), 1e-6) * std::max(1.0, lo);
    for (double drop = 1e-10 * std::max(1.0, lo); drop <= limit; drop *= 2.0) {
      if (lo - drop <= 0.0) break;
      if (auto x = valid(lo - drop)) {
        best = std::move(x);
        good = lo - drop;
        bad = lo;
        break;
      }
    }
    if (!best) return fallback;
  } else if (auto top = valid(hi)) {
    good = hi;
    bad = hi;
    best = std::move(top);
  }
  for (int iter = 0; iter < 200 && bad - good > 1e-15 * (1.0 + good); ++iter) {
    const double mid = 0.5 * (good + bad);
    if (auto x = valid(mid)) {
      good = mid;
      best = std::move(x);
    } else {
      bad = mid;
    }
  }
  for (double& v : *best) {
    if (std::abs(v) < 1e-11) v = 0.0;
  }
  refine_vertex(build_lp(kind, k, p, y, 0.0, explicit_flag),
                build_lp(kind, k, p, y, 1.0, explicit_flag), good, *best);
  const LpProblem lp = build_lp(kind, k, p, y, good, explicit_flag);
  if (std::any_of(best->begin(), best->end(), [](double v) { return v < 0.0; })) {
    return fallback;
  }
  if (relative_residual(lp, *best) > lp_options.feas_tol) return fallback;
  return Polished{good, std::move(*best)};
}

std::vector<double> lp_point_of(const MethodTable& method, double r,
                                double y) {
  const int k = method.k;
  std::vector<double> point(3 * k + 2, 0.0);
  for (int j = 0; j < k; ++j) {
    point[j] = std::max(0.0, flush(method.alpha[j] - r * method.beta[j] -
                                   y * r * method.beta_second[j]));
  }
  for (int j = 0; j <= k; ++j) {
    point[k + j] = method.beta[j];
    point[2 * k + 1 + j] = method.beta_second[j];
  }
  return point;
}


// The same correction applied to the order conditions of a finished table,
// over its nonzero coefficients. This absorbs the rounding of the
// reconstruction alpha = gamma + r beta + ..., which is otherwise amplified by
// moments of size k^p.
void refine_order_conditions(MethodTable& method, int p) {
  const bool additive = method.family == Family::kAdditive;
  const bool downwind = method.family == Family::kPerturbed;
  struct Variable {
    std::vector<double>* array;
    int index;
  };
  std::vector<Variable> vars;
  for (auto* array : {&method.alpha, &method.beta, &method.beta_second}) {
    for (int j = 0; j < static_cast<int>(array->size()); ++j) {
      if ((*array)[j] != 0.0) vars.push_back({array, j});
    }
  }
  if (vars.empty()) return;
  // Row (side, i): sum alpha_j j^i + sum w_j i j^(i-1) = k^i with w = beta on
  // side 0 and beta_second on side 1; perturbed rows use beta - beta_second.
  std::vector<std::pair<int, int>> rows;
  for (int i = 0; i <= p; ++i) rows.emplace_back(0, i);
  if (additive) {
    for (int i = 1; i <= p; ++i) rows.emplace_back(1, i);
  }
  const auto coefficient = [&](int side, int order, const Variable& v) {
    const Extended j = v.index;
    if (v.array == &method.alpha) return order == 0 ? 1.0L : std::pow(j, order);
    if (order == 0) return 0.0L;
    const Extended d = order * (order == 1 ? 1.0L : std::pow(j, order - 1));
    if (v.array == &method.beta) return (additive && side == 1) ? 0.0L : d;
    if (downwind) return -d;
    return (additive && side == 1) ? d : 0.0L;
  };
  const std::size_t m = rows.size();
  const std::size_t n = vars.size();
  std::vector<Extended> a(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      a[r * n + c] = coefficient(rows[r].first, rows[r].second, vars[c]);
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<Extended> rhs(m);
    for (std::size_t r = 0; r < m; ++r) {
      Extended sum = std::pow(static_cast<Extended>(method.k), rows[r].second);
      for (std::size_t c = 0; c < n; ++c) {
        sum -= a[r * n + c] * (*vars[c].array)[vars[c].index];
      }
      rhs[r] = sum;
    }
    const std::vector<Extended> d = min_norm_correction(a, m, n, std::move(rhs));
    for (std::size_t c = 0; c < n; ++c) {
      double& value = (*vars[c].array)[vars[c].index];
      value = static_cast<double>(value + d[c]);
    }
  }
  // What remains is the rounding of the coefficients themselves, which moments
  // of size k^p amplify to about 1e-10 at k = 10, p = 6. Single-ulp moves that
  // lower the largest residual recover most of it.
  double current = max_abs(order_residuals(method, p));
  for (int round = 0; round < 8 && current > 0.0; ++round) {
    bool improved = false;
    for (const Variable& v : vars) {
      double& value = (*v.array)[v.index];
      const double original = value;
      for (double toward : {std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity()}) {
        value = std::nextafter(original, toward);
        const double trial = max_abs(order_residuals(method, p));
        if (trial < current) {
          current = trial;
          improved = true;
          break;
        }
        value = original;
      }
    }
    if (!improved) break;
  }
}

}  // namespace

std::optional<OptimalMethodResult> optimal_method(
    MethodClass kind, int k, int p, double y, bool explicit_flag,
    const OptimizerOptions& options) {
  check_sizes(k, p, y, 0.0);
  if (kind == MethodClass::kClassical) y = 0.0;
  if (kind == MethodClass::kImex) explicit_flag = false;

  const auto feasible = [&](double r) {
    return solve_feasibility(build_lp(kind, k, p, y, r, explicit_flag),
                             options.lp);
  };

  std::optional<LpSolution> at_lo = feasible(0.0);
  if (!at_lo) return std::nullopt;
  double lo = 0.0;
  double hi = p >= 2 ? 2.0 * (1.0 + options.bracket_margin) : 1.0;
  while (auto solution = feasible(hi)) {
    lo = hi;
    at_lo = std::move(solution);
    if (hi >= options.r_cap) throw BracketCapError(options.r_cap);
    hi = std::min(2.0 * hi, options.r_cap);
  }
  while (hi - lo > options.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto solution = feasible(mid)) {
      lo = mid;
      at_lo = std::move(solution);
    } else {
      hi = mid;
    }
  }
  if (lo == 0.0) return std::nullopt;

  Polished polished =
      polish(kind, k, p, y, explicit_flag, lo, hi, *at_lo, options.lp);
  const double r = polished.r;

  OptimalMethodResult result;
  result.kind = kind;
  result.k = k;
  result.p = p;
  result.y = y;
  result.explicit_flag = explicit_flag;
  result.bisection_gap = hi - r;
  result.method = method_from_lp_point(kind, k, y, r, polished.point);
  if (kind == MethodClass::kPerturbed) {
    result.method = canonicalize_downwind(result.method);
    refine_order_conditions(result.method, p);
    result.lp_point = lp_point_of(result.method, r, y);
  } else {
    refine_order_conditions(result.method, p);
    result.lp_point = std::move(polished.point);
  }
  result.nonzero_count = positive_support(result.lp_point);

  result.certificate.r = r;
  result.certificate.r_second = y * r;
  result.certificate.y = y;
  result.certificate.gamma.assign(result.lp_point.begin(),
                                  result.lp_point.begin() + k);
  for (double& g : result.certificate.gamma) g = std::max(g, 0.0);
  // The certificate never exceeds what the returned table itself achieves.
  if (auto table = ssp_coefficient_pair(result.method, y);
      table && !table->unbounded && table->r < r) {
    result.certificate = *table;
  }
  return result;
}

std::optional<OptimalMethodResult> result_for_table(MethodClass kind,
                                                    const MethodTable& method,
                                                    int p, double y) {
  method.validate();
  if (p < 1) throw std::invalid_argument("order must be at least 1");
  const bool additive_table = method.family == Family::kAdditive;
  const bool wants_additive =
      kind == MethodClass::kAdditive || kind == MethodClass::kImex;
  if (additive_table != wants_additive ||
      (kind == MethodClass::kPerturbed) !=
          (method.family == Family::kPerturbed)) {
    throw std::invalid_argument("method family does not match the class");
  }
  if (kind == MethodClass::kImex && method.beta[method.k] != 0.0) {
    throw std::invalid_argument("IMEX tables have an explicit F part");
  }
  if (kind == MethodClass::kClassical) y = 0.0;
  auto certificate = ssp_coefficient_pair(method, y);
  if (!certificate || (!certificate->unbounded && certificate->r <= 0.0)) {
    return std::nullopt;
  }
  OptimalMethodResult result;
  result.kind = kind;
  result.method = method;
  result.certificate = *certificate;
  result.k = method.k;
  result.p = p;
  result.y = y;
  result.explicit_flag = !method.is_implicit();
  const int k = method.k;
  result.lp_point.assign(certificate->gamma.begin(), certificate->gamma.end());
  const int beta_count = kind == MethodClass::kImex ? k : k + 1;
  result.lp_point.insert(result.lp_point.end(), method.beta.begin(),
                         method.beta.begin() + beta_count);
  result.lp_point.insert(result.lp_point.end(), method.beta_second.begin(),
                         method.beta_second.end());
  result.nonzero_count = positive_support(result.lp_point);
  return result;
}

std::vector<RegionSample> region_scan(MethodClass kind, int k, int p,
                                      std::span<const double> y_grid,
                                      bool explicit_flag,
                                      const OptimizerOptions& options,
                                      int threads) {
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    if (!(y_grid[i] >= 0.0) || (i > 0 && !(y_grid[i] > y_grid[i - 1]))) {
      throw std::invalid_argument(
          "y grid must be nonnegative and strictly increasing");
    }
  }
  std::vector<RegionSample> samples(y_grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto work = [&] {
    for (std::size_t i = next++; i < y_grid.size(); i = next++) {
      try {
        const double y = y_grid[i];
        const auto result = optimal_method(kind, k, p, y, explicit_flag, options);
        const double c = result ? result->certificate.r : 0.0;
        samples[i] = RegionSample{y, c, y * c};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (threads <= 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min<int>(threads, static_cast<int>(y_grid.size()));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
  return samples;
}

std::optional<MethodTable> canonical_additive(
    const OptimalMethodResult& result) {
  if (result.method.family != Family::kAdditive) return std::nullopt;
  const MethodTable& method = result.method;
  const double r = result.certificate.r;
  const double r_hat = result.certificate.r_second;
  const int k = method.k;

  // Copy one weight sequence onto the other; the order conditions of the two
  // sides then coincide, so only the slack signs need rechecking.
  for (const bool keep_f : {true, false}) {
    const std::vector<double>& weights =
        keep_f ? method.beta : method.beta_second;
    MethodTable candidate = method;
    candidate.beta = weights;
    candidate.beta_second = weights;
    bool ok = true;
    for (int j = 0; j < k && ok; ++j) {
      ok = method.alpha[j] - (r + r_hat) * candidate.beta[j] >= -1e-10;
    }
    if (!ok) continue;
    candidate.explicit_flag = !candidate.is_implicit();
    if (satisfies_order(candidate, result.p)) return candidate;
  }
  return std::nullopt;
}

bool verify_additive_beta_equality(const OptimalMethodResult& result) {
  if (result.method.family != Family::kAdditive) return false;
  double gap = 0.0;
  for (int j = 0; j <= result.method.k; ++j) {
    gap = std::max(gap, std::abs(result.method.beta[j] -
                                 result.method.beta_second[j]));
  }
  if (gap <= 1e-8) return true;
  return canonical_additive(result).has_value();
}

bool verify_nonzero_bound(const OptimalMethodResult& result) {
  constexpr double kThreshold = 1e-10;
  switch (result.kind) {
    case MethodClass::kClassical:
    case MethodClass::kPerturbed:
      return positive_support(result.lp_point, kThreshold) <= result.p;
    case MethodClass::kAdditive: {
      const auto canonical = canonical_additive(result);
      if (!canonical) return false;
      const double total = result.certificate.r + result.certificate.r_second;
      int count = positive_support(canonical->beta, kThreshold);
      for (int j = 0; j < canonical->k; ++j) {
        if (canonical->alpha[j] - total * canonical->beta[j] > kThreshold) {
          ++count;
        }
      }
      return count <= result.p;
    }
    case MethodClass::kImex:
      return positive_support(result.lp_point, kThreshold) <= 2 * result.p + 1;
  }
  return false;
}

Uniqueness uniqueness_test(const OptimalMethodResult& result) {
  if (result.kind != MethodClass::kPerturbed &&
      result.kind != MethodClass::kClassical) {
    throw std::invalid_argument(
        "uniqueness test applies to classical and perturbed methods");
  }
  const int p = result.p;
  const LpProblem lp =
      build_lp(result.kind, result.k, p, result.y, result.certificate.r,
               result.explicit_flag);
  std::vector<int> active;
  std::vector<int> inactive;
  for (int col = 0; col < lp.n_cols; ++col) {
    bool zero_column = true;
    for (int row = 0; row < lp.n_rows; ++row) {
      zero_column = zero_column && lp.at(row, col) == 0.0;
    }
    if (result.lp_point[col] > 1e-10) {
      active.push_back(col);
    } else if (!zero_column) {
      inactive.push_back(col);
    }
  }
  if (static_cast<int>(active.size()) != p) {
    throw std::invalid_argument("uniqueness test needs exactly p active entries");
  }

  const int n = p + 1;
  int sign = 0;
  for (int test : inactive) {
    std::vector<double> matrix(n * n);
    double norm_product = 1.0;
    for (int c = 0; c < n; ++c) {
      const int col = c < p ? active[c] : test;
      double norm = 0.0;
      for (int row = 0; row < n; ++row) {
        matrix[row * n + c] = lp.at(row, col);
        norm += lp.at(row, col) * lp.at(row, col);
      }
      norm_product *= std::sqrt(norm);
    }
    const double det = internal::determinant(std::move(matrix), n) / norm_product;
    if (std::abs(det) <= 1e-9) return Uniqueness::kInconclusive;
    const int s = det > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return Uniqueness::kInconclusive;
  }
  return Uniqueness::kUnique;
}

}  // namespace ssplmm

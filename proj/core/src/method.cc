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

#include "ssplmm/method.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "numeric.h"

namespace ssplmm {

using internal::CompensatedSum;
using internal::dpow;
using internal::flush;
using internal::ipow;

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kClassical:
      return "classical";
    case Family::kPerturbed:
      return "perturbed";
    case Family::kAdditive:
      return "additive";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "classical") return Family::kClassical;
  if (name == "perturbed") return Family::kPerturbed;
  if (name == "additive") return Family::kAdditive;
  return std::nullopt;
}

void MethodTable::validate() const {
  if (k < 1 || k > kMaxSteps) {
    throw std::invalid_argument("number of steps must lie in [1, " +
                                std::to_string(kMaxSteps) + "], got " +
                                std::to_string(k));
  }
  const auto steps = static_cast<std::size_t>(k);
  if (alpha.size() != steps) {
    throw std::invalid_argument("alpha must have k entries");
  }
  if (beta.size() != steps + 1 || beta_second.size() != steps + 1) {
    throw std::invalid_argument("beta arrays must have k + 1 entries");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(alpha.begin(), alpha.end(), finite) ||
      !std::all_of(beta.begin(), beta.end(), finite) ||
      !std::all_of(beta_second.begin(), beta_second.end(), finite)) {
    throw std::invalid_argument("method coefficients must be finite");
  }
  if (family == Family::kClassical &&
      std::any_of(beta_second.begin(), beta_second.end(),
                  [](double v) { return v != 0.0; })) {
    throw std::invalid_argument("classical method has nonzero beta_second");
  }
  if (explicit_flag && (beta[steps] != 0.0 || beta_second[steps] != 0.0)) {
    throw std::invalid_argument("explicit method has a nonzero implicit weight");
  }
}

bool MethodTable::is_implicit() const {
  const auto steps = static_cast<std::size_t>(k);
  return beta[steps] != 0.0 || beta_second[steps] != 0.0;
}

MethodTable make_method(Family family, std::vector<double> alpha,
                        std::vector<double> beta,
                        std::vector<double> beta_second) {
  MethodTable method;
  method.k = static_cast<int>(alpha.size());
  method.family = family;
  method.alpha = std::move(alpha);
  method.beta = std::move(beta);
  method.beta_second = beta_second.empty()
                           ? std::vector<double>(method.beta.size(), 0.0)
                           : std::move(beta_second);
  if (!method.beta.empty()) {
    method.explicit_flag =
        method.beta.back() == 0.0 &&
        (method.beta_second.empty() || method.beta_second.back() == 0.0);
  }
  method.validate();
  return method;
}

namespace {

// Residuals sum_j alpha_j j^i + sum_j w_j i j^(i-1) - k^i for i = 0..p.
void append_residuals(std::span<const double> alpha,
                      std::span<const double> weights, int p,
                      std::vector<double>& out) {
  const int k = static_cast<int>(alpha.size());
  for (int i = 0; i <= p; ++i) {
    CompensatedSum sum;
    for (int j = 0; j < k; ++j) sum.add(alpha[j] * ipow(j, i));
    for (int j = 0; j <= k; ++j) sum.add(weights[j] * dpow(j, i));
    sum.add(-ipow(k, i));
    out.push_back(sum.value());
  }
}

}  // namespace

std::vector<double> order_residuals(const MethodTable& method, int p) {
  if (p < 1) throw std::invalid_argument("order must be at least 1");
  method.validate();
  std::vector<double> residuals;
  if (method.family == Family::kAdditive) {
    residuals.reserve(2 * (p + 1));
    append_residuals(method.alpha, method.beta, p, residuals);
    append_residuals(method.alpha, method.beta_second, p, residuals);
    return residuals;
  }
  const MethodTable underlying =
      method.family == Family::kPerturbed ? to_underlying(method) : method;
  residuals.reserve(p + 1);
  append_residuals(underlying.alpha, underlying.beta, p, residuals);
  return residuals;
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool satisfies_order(const MethodTable& method, int p) {
  return max_abs(order_residuals(method, p)) <= kOrderTolerance;
}

std::optional<SspCertificate> ssp_coefficient_pair(const MethodTable& method,
                                                   double y) {
  method.validate();
  if (!(y >= 0.0) || !std::isfinite(y)) {
    throw std::invalid_argument("y must be finite and nonnegative");
  }
  const int k = method.k;
  for (int j = 0; j <= k; ++j) {
    if (flush(method.beta[j]) < 0.0 || flush(method.beta_second[j]) < 0.0) {
      return std::nullopt;
    }
  }

  double r = std::numeric_limits<double>::max();
  int binding = -1;
  for (int j = 0; j < k; ++j) {
    const double alpha = flush(method.alpha[j]);
    if (alpha < 0.0) return std::nullopt;
    const double weight =
        flush(method.beta[j]) + y * flush(method.beta_second[j]);
    if (weight <= 0.0) continue;
    if (alpha == 0.0) return std::nullopt;
    const double ratio = alpha / weight;
    if (ratio < r) {
      r = ratio;
      binding = j;
    }
  }

  SspCertificate cert;
  cert.y = y;
  if (binding < 0) {
    cert.unbounded = true;
    cert.gamma.assign(method.alpha.begin(), method.alpha.end());
    return cert;
  }
  cert.r = r;
  cert.r_second = y * r;
  cert.gamma.resize(k);
  for (int j = 0; j < k; ++j) {
    const double g = method.alpha[j] - r * flush(method.beta[j]) -
                     cert.r_second * flush(method.beta_second[j]);
    cert.gamma[j] = j == binding ? 0.0 : std::max(g, 0.0);
  }
  return cert;
}

MethodTable to_underlying(const MethodTable& method) {
  if (method.family != Family::kPerturbed) {
    throw std::invalid_argument("to_underlying requires a perturbed method");
  }
  method.validate();
  MethodTable out = method;
  out.family = Family::kClassical;
  for (int j = 0; j <= method.k; ++j) {
    out.beta[j] = method.beta[j] - method.beta_second[j];
    out.beta_second[j] = 0.0;
  }
  return out;
}

MethodTable canonicalize_downwind(const MethodTable& method) {
  if (method.family != Family::kPerturbed) {
    throw std::invalid_argument(
        "canonicalize_downwind requires a perturbed method");
  }
  method.validate();
  MethodTable out = method;
  for (int j = 0; j <= method.k; ++j) {
    const double up = flush(method.beta[j]);
    const double down = flush(method.beta_second[j]);
    if (up < 0.0 || down < 0.0) {
      throw std::invalid_argument(
          "canonicalize_downwind requires nonnegative weights");
    }
    out.beta[j] = flush(std::max(up - down, 0.0));
    out.beta_second[j] = flush(std::max(down - up, 0.0));
  }
  return out;
}

std::vector<double> moment_vector(int j, int p) {
  if (p < 1) throw std::invalid_argument("order must be at least 1");
  std::vector<double> a(p + 1);
  for (int i = 0; i <= p; ++i) a[i] = ipow(j, i);
  return a;
}

std::vector<double> moment_vector_perturbed(int j, int p, int sign, double x,
                                            int k) {
  if (p < 1) throw std::invalid_argument("order must be at least 1");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  if (j < 0 || j > k) throw std::invalid_argument("index outside [0, k]");
  std::vector<double> b(p + 1);
  for (int i = 0; i <= p; ++i) {
    const double derivative = sign * x * dpow(j, i);
    b[i] = j == k ? derivative : ipow(j, i) + derivative;
  }
  return b;
}

}  // namespace ssplmm

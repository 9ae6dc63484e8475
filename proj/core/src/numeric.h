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

#ifndef SSPLMM_SRC_NUMERIC_H_
#define SSPLMM_SRC_NUMERIC_H_

#include <cmath>

namespace ssplmm::internal {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// base^exponent for a nonnegative integer exponent, with 0^0 == 1.
inline double ipow(double base, int exponent) {
  double result = 1.0;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

// d/dj j^i = i j^(i-1), zero for i == 0.
inline double dpow(double base, int exponent) {
  return exponent == 0 ? 0.0 : exponent * ipow(base, exponent - 1);
}

inline double flush(double value) {
  return std::abs(value) < 1e-13 ? 0.0 : value;
}

}  // namespace ssplmm::internal

#endif  // SSPLMM_SRC_NUMERIC_H_

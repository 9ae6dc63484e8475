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

// JSON form of a method table plus the coefficient it was certified at.

#ifndef SSPLMM_TOOLS_METHOD_DOCUMENT_H_
#define SSPLMM_TOOLS_METHOD_DOCUMENT_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "ssplmm/method.h"
#include "ssplmm/optimizer.h"

namespace ssplmm::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct MethodDocument {
  MethodClass kind = MethodClass::kClassical;
  int p = 1;
  double y = 0.0;
  double r = 0.0;
  double r_second = 0.0;
  MethodTable method;
  nlohmann::json meta = nlohmann::json::object();
};

class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Doubles are written in shortest round-trip form, so parse(dump(d)) == d.
nlohmann::json to_json(const MethodDocument& doc);

// Throws DocumentError on missing fields, wrong sizes, non-finite values, or
// a history-weight sum different from one.
MethodDocument document_from_json(const nlohmann::json& j);
MethodDocument load_document(const std::string& path);

MethodDocument document_from_result(const OptimalMethodResult& result,
                                    const OptimizerOptions& options);

// dlmm32, plmm32, lmm32 and forward-euler.
std::optional<MethodDocument> builtin_document(std::string_view name);

}  // namespace ssplmm::cli

#endif  // SSPLMM_TOOLS_METHOD_DOCUMENT_H_

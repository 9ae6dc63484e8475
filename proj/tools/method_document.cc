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

#include "method_document.h"

#include <cmath>
#include <fstream>
#include <vector>

namespace ssplmm::cli {

namespace {

Family family_for(MethodClass kind) {
  switch (kind) {
    case MethodClass::kClassical:
      return Family::kClassical;
    case MethodClass::kPerturbed:
      return Family::kPerturbed;
    case MethodClass::kAdditive:
    case MethodClass::kImex:
      return Family::kAdditive;
  }
  return Family::kClassical;
}

template <typename T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) {
    throw DocumentError(std::string("method document lacks '") + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DocumentError(std::string("method document field '") + name +
                        "' has the wrong type");
  }
}

double finite_field(const nlohmann::json& j, const char* name) {
  const double v = field<double>(j, name);
  if (!std::isfinite(v)) {
    throw DocumentError(std::string("field '") + name + "' is not finite");
  }
  return v;
}

MethodDocument make_builtin(MethodClass kind, std::vector<double> alpha,
                            std::vector<double> beta,
                            std::vector<double> beta_second, double y) {
  MethodDocument doc;
  doc.kind = kind;
  doc.p = 2;
  doc.y = y;
  doc.method = make_method(family_for(kind), std::move(alpha), std::move(beta),
                           std::move(beta_second));
  if (auto cert = ssp_coefficient_pair(doc.method, y)) {
    doc.r = cert->r;
    doc.r_second = cert->r_second;
  }
  doc.meta = {{"tool_version", kToolVersion}, {"source", "builtin"}};
  return doc;
}

}  // namespace

nlohmann::json to_json(const MethodDocument& doc) {
  return nlohmann::json{
      {"kind", to_string(doc.kind)},
      {"k", doc.method.k},
      {"p", doc.p},
      {"y", doc.y},
      {"r", doc.r},
      {"r_second", doc.r_second},
      {"alpha", doc.method.alpha},
      {"beta", doc.method.beta},
      {"beta_second", doc.method.beta_second},
      {"meta", doc.meta},
  };
}

MethodDocument document_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DocumentError("method document must be an object");
  MethodDocument doc;
  const auto kind = parse_method_class(field<std::string>(j, "kind"));
  if (!kind) throw DocumentError("unknown method kind");
  doc.kind = *kind;
  const int k = field<int>(j, "k");
  doc.p = field<int>(j, "p");
  if (doc.p < 1) throw DocumentError("order p must be positive");
  doc.y = finite_field(j, "y");
  doc.r = finite_field(j, "r");
  doc.r_second = finite_field(j, "r_second");
  auto alpha = field<std::vector<double>>(j, "alpha");
  auto beta = field<std::vector<double>>(j, "beta");
  auto beta_second = j.contains("beta_second")
                         ? field<std::vector<double>>(j, "beta_second")
                         : std::vector<double>(beta.size(), 0.0);
  if (static_cast<int>(alpha.size()) != k) {
    throw DocumentError("alpha must have k entries");
  }
  if (j.contains("meta")) doc.meta = j.at("meta");
  try {
    doc.method = make_method(family_for(doc.kind), std::move(alpha),
                             std::move(beta), std::move(beta_second));
  } catch (const std::invalid_argument& e) {
    throw DocumentError(std::string("invalid method table: ") + e.what());
  }
  double sum = 0.0;
  for (double a : doc.method.alpha) sum += a;
  if (std::abs(sum - 1.0) > kOrderTolerance) {
    throw DocumentError("history weights must sum to one");
  }
  return doc;
}

MethodDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open method document " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError(std::string("malformed JSON: ") + e.what());
  }
  return document_from_json(j);
}

MethodDocument document_from_result(const OptimalMethodResult& result,
                                    const OptimizerOptions& options) {
  MethodDocument doc;
  doc.kind = result.kind;
  doc.p = result.p;
  doc.y = result.y;
  doc.r = result.certificate.r;
  doc.r_second = result.certificate.r_second;
  doc.method = result.method;
  doc.meta = {
      {"tool_version", kToolVersion},
      {"bisect_tol", options.bisect_tol},
      {"feas_tol", options.lp.feas_tol},
      {"bisection_gap", result.bisection_gap},
      {"nonzero_count", result.nonzero_count},
      {"explicit", result.explicit_flag},
  };
  return doc;
}

std::optional<MethodDocument> builtin_document(std::string_view name) {
  if (name == "lmm32") {
    return make_builtin(MethodClass::kClassical, {0.5, 0.5}, {-0.25, 1.75, 0.0},
                        {}, 0.0);
  }
  if (name == "dlmm32") {
    return make_builtin(MethodClass::kPerturbed, {0.5, 0.5}, {0.0, 1.75, 0.0},
                        {0.25, 0.0, 0.0}, 1.0);
  }
  if (name == "plmm32") {
    return make_builtin(MethodClass::kPerturbed, {0.5, 0.5}, {0.25, 2.0, 0.0},
                        {0.5, 0.25, 0.0}, 1.0);
  }
  if (name == "forward-euler") {
    MethodDocument doc =
        make_builtin(MethodClass::kClassical, {1.0}, {1.0, 0.0}, {}, 0.0);
    doc.p = 1;
    return doc;
  }
  return std::nullopt;
}

}  // namespace ssplmm::cli

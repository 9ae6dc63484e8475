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

#include "cli.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "method_document.h"
#include "ssplmm/integrator.h"
#include "ssplmm/optimizer.h"
#include "ssplmm/problems.h"

namespace ssplmm::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MethodClass class_or_throw(const std::string& name) {
  const auto kind = parse_method_class(name);
  if (!kind) throw UsageError("unknown family '" + name + "'");
  return *kind;
}

int thread_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<int>(value);
  }
  return 0;
}

std::string format12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---- optimize -------------------------------------------------------------

struct OptimizeFlags {
  std::string family;
  int k = 0;
  int p = 0;
  double y = 1.0;
  bool implicit = false;
  double tol = 1e-6;
  bool pretty = false;
  bool json_flag = false;
};

int cmd_optimize(const OptimizeFlags& f, std::ostream& out) {
  const MethodClass kind = class_or_throw(f.family);
  OptimizerOptions options;
  options.bisect_tol = f.tol;
  std::optional<OptimalMethodResult> result;
  try {
    result = optimal_method(kind, f.k, f.p, f.y, !f.implicit, options);
  } catch (const BracketCapError& e) {
    out << json{{"status", "unbounded"}, {"cap", e.cap()}}.dump() << "\n";
    return kBracketCap;
  }
  if (!result) {
    out << json{{"status", "infeasible"}}.dump() << "\n";
    return kInfeasible;
  }
  const json doc = to_json(document_from_result(*result, options));
  out << (f.pretty ? doc.dump(2) : doc.dump()) << "\n";
  return kOk;
}

// ---- region ---------------------------------------------------------------

struct RegionFlags {
  std::string family;
  int k = 0;
  int p = 0;
  double ymin = 0.0;
  double ymax = 0.0;
  int n = 0;
  bool implicit = false;
  int threads = 0;
};

int cmd_region(const RegionFlags& f, std::ostream& out) {
  const MethodClass kind = class_or_throw(f.family);
  if (!(f.ymin > 0.0) || !(f.ymax >= f.ymin) || !std::isfinite(f.ymax)) {
    throw UsageError("need 0 < ymin <= ymax");
  }
  if (f.n < 1) throw UsageError("need n >= 1");
  if (f.n > 1 && !(f.ymax > f.ymin)) {
    throw UsageError("a grid of more than one point needs ymin < ymax");
  }
  std::vector<double> grid(f.n);
  for (int i = 0; i < f.n; ++i) {
    grid[i] = f.n == 1 ? f.ymin
                       : std::exp(std::log(f.ymin) +
                                  (std::log(f.ymax) - std::log(f.ymin)) * i /
                                      (f.n - 1));
  }
  grid.back() = f.n == 1 ? f.ymin : f.ymax;
  std::vector<RegionSample> samples;
  try {
    samples = region_scan(kind, f.k, f.p, grid, !f.implicit, {},
                          thread_count(f.threads));
  } catch (const BracketCapError& e) {
    out << json{{"status", "unbounded"}, {"cap", e.cap()}}.dump() << "\n";
    return kBracketCap;
  }
  out << "y,C,C_second\n";
  for (const RegionSample& s : samples) {
    out << format12(s.y) << "," << format12(s.c) << "," << format12(s.c_second)
        << "\n";
  }
  return kOk;
}

// ---- certify --------------------------------------------------------------

struct CertifyFlags {
  std::string input;
  std::optional<double> y;
  std::optional<int> order;
};

int cmd_certify(const CertifyFlags& f, std::ostream& out) {
  const auto builtin = builtin_document(f.input);
  const MethodDocument doc = builtin ? *builtin : load_document(f.input);
  const double y = f.y.value_or(doc.y);
  const int p = f.order.value_or(doc.p);
  if (!(y >= 0.0) || !std::isfinite(y)) throw UsageError("need y >= 0");
  if (p < 1) throw UsageError("need order >= 1");

  const std::vector<double> residuals = order_residuals(doc.method, p);
  const double max_residual = max_abs(residuals);
  const bool order_ok = max_residual <= kOrderTolerance;

  json report{{"order_ok", order_ok}, {"max_residual", max_residual}};
  const auto result = result_for_table(doc.kind, doc.method, p, y);
  if (!result) {
    report["ssp"] = {{"r", 0.0}, {"r_second", 0.0}};
    report["nonzero_bound_ok"] = nullptr;
  } else if (result->certificate.unbounded) {
    report["ssp"] = {{"r", nullptr}, {"r_second", nullptr}, {"unbounded", true}};
    report["nonzero_bound_ok"] = nullptr;
  } else {
    report["ssp"] = {{"r", result->certificate.r},
                     {"r_second", result->certificate.r_second}};
    report["nonzero_bound_ok"] = verify_nonzero_bound(*result);
  }
  if (doc.kind == MethodClass::kAdditive) {
    report["beta_equality_ok"] =
        result ? json(verify_additive_beta_equality(*result)) : json(nullptr);
  }
  out << report.dump() << "\n";
  return order_ok ? kOk : kOrderFailure;
}

// ---- integrate ------------------------------------------------------------

struct IntegrateFlags {
  std::string problem;
  std::string method;
  std::optional<double> dt;
  int steps = 1000;
  double u0 = 0.5;
  int u0_sweep = 0;
  std::optional<double> mu;
  int m = 200;
  std::optional<double> dx;
  bool find_max_dt = false;
  std::optional<double> dt_max;
  std::string out_path;
};

MethodDocument resolve_method(const std::string& name) {
  if (auto builtin = builtin_document(name)) return *builtin;
  return load_document(name);
}

IvpProblem resolve_problem(const IntegrateFlags& f) {
  if (f.problem == "cubic") return scalar_cubic_problem(f.u0);
  if (f.problem != "leveque-yee" && f.problem != "leveque-yee-imex") {
    throw UsageError("unknown problem '" + f.problem + "'");
  }
  LeVequeYeeConfig config = LeVequeYeeConfig::with_grid(f.m, 2.0 / 3.0);
  if (f.dx) {
    config.dx = *f.dx;
    config.tau = *f.dx;
  }
  config.mu = f.mu.value_or((2.0 / 3.0) / config.tau);
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return f.problem == "leveque-yee" ? leveque_yee_problem(config)
                                    : leveque_yee_imex_problem(config);
}

Trajectory run_once(const MethodTable& method, const IvpProblem& problem,
                    double dt, int steps) {
  if (dt <= spinup_radius(problem)) {
    return integrate(method, problem, dt, steps, Starting::kEulerSpinup);
  }
  const std::vector<State> history(method.k, problem.initial_state);
  return integrate(method, problem, dt, steps, Starting::kSupplied, history);
}

void write_trajectory(const std::string& path, const Trajectory& t) {
  std::ofstream csv(path);
  if (!csv) throw UsageError("cannot write " + path);
  csv << "n,t,measure";
  const std::size_t m = t.states.empty() ? 0 : t.states.front().size();
  for (std::size_t i = 0; i < m; ++i) csv << ",u" << i;
  csv << "\n";
  char buf[64];
  for (std::size_t n = 0; n < t.states.size(); ++n) {
    csv << n;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g", n * t.dt, t.measures[n]);
    csv << buf;
    for (double v : t.states[n]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      csv << buf;
    }
    csv << "\n";
  }
}

int cmd_integrate(const IntegrateFlags& f, std::ostream& out) {
  const MethodDocument doc = resolve_method(f.method);
  IvpProblem problem = resolve_problem(f);
  if (f.steps < 0) throw UsageError("need steps >= 0");
  if (!f.dt && !f.find_max_dt) throw UsageError("need --dt or --find-max-dt");
  if (f.dt && !(*f.dt > 0.0 && std::isfinite(*f.dt))) {
    throw UsageError("need dt > 0");
  }

  std::vector<State> initial_states;
  if (f.problem == "cubic" && f.u0_sweep > 0) {
    for (int i = 1; i <= f.u0_sweep; ++i) {
      initial_states.push_back({static_cast<double>(i) / (f.u0_sweep + 1)});
    }
  } else {
    initial_states.push_back(problem.initial_state);
  }

  json summary{{"steps", f.steps}, {"initial_states", initial_states.size()}};
  try {
    if (f.dt) {
      double worst = 0.0;
      for (const State& u0 : initial_states) {
        const Trajectory t =
            run_once(doc.method, with_initial_state(problem, u0), *f.dt, f.steps);
        worst = std::max(worst, monotone_measure(t, doc.method.k));
        if (!f.out_path.empty()) write_trajectory(f.out_path, t);
      }
      summary["dt"] = *f.dt;
      summary["max_violation"] = worst;
      summary["monotone"] = worst == 0.0;
    }
    if (f.find_max_dt) {
      const double hi = f.dt_max.value_or(4.0 * problem.dt_fe);
      const double lo = 1e-3 * std::min(problem.dt_fe, hi);
      summary["max_monotone_dt"] = max_monotone_dt(
          doc.method, problem, lo, hi, initial_states, f.steps > 0 ? f.steps : 1);
    }
  } catch (const NewtonError& e) {
    out << json{{"status", "solver_failure"}, {"residual", e.residual()}}.dump()
        << "\n";
    return kSolverFailure;
  }
  out << summary.dump() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Optimal strong-stability-preserving multistep methods", "ssplmm"};
  app.require_subcommand(1);

  OptimizeFlags opt;
  auto* optimize = app.add_subcommand("optimize", "optimal method as JSON");
  optimize->add_option("--family", opt.family, "classical|perturbed|additive|imex")
      ->required();
  optimize->add_option("--k", opt.k, "steps")->required()->check(CLI::Range(1, kMaxSteps));
  optimize->add_option("--p", opt.p, "order")->required()->check(CLI::PositiveNumber);
  optimize->add_option("--y", opt.y, "step-size ratio")->check(CLI::NonNegativeNumber);
  optimize->add_flag("--implicit", opt.implicit, "allow implicit weights");
  optimize->add_option("--tol", opt.tol, "bisection tolerance")->check(CLI::PositiveNumber);
  auto* as_json = optimize->add_flag("--json", opt.json_flag, "compact JSON (default)");
  auto* pretty = optimize->add_flag("--pretty", opt.pretty, "indented JSON");
  as_json->excludes(pretty);

  RegionFlags reg;
  auto* region = app.add_subcommand("region", "SSP coefficient over a y grid as CSV");
  region->add_option("--family", reg.family)->required();
  region->add_option("--k", reg.k)->required()->check(CLI::Range(1, kMaxSteps));
  region->add_option("--p", reg.p)->required()->check(CLI::PositiveNumber);
  region->add_option("--ymin", reg.ymin)->required();
  region->add_option("--ymax", reg.ymax)->required();
  region->add_option("--n", reg.n, "log-spaced grid size")->required();
  region->add_flag("--implicit", reg.implicit);
  region->add_option("--threads", reg.threads, "workers (default: THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  CertifyFlags cert;
  auto* certify = app.add_subcommand("certify", "check a method document");
  certify->add_option("--input", cert.input, "document path or builtin name")->required();
  certify->add_option("--y", cert.y);
  certify->add_option("--order", cert.order);

  IntegrateFlags integ;
  auto* integrate_cmd = app.add_subcommand("integrate", "time-step a test problem");
  integrate_cmd->add_option("--problem", integ.problem, "cubic|leveque-yee|leveque-yee-imex")
      ->required();
  integrate_cmd->add_option("--method", integ.method,
                            "document path or dlmm32|plmm32|lmm32|forward-euler")
      ->required();
  integrate_cmd->add_option("--dt", integ.dt);
  integrate_cmd->add_option("--steps", integ.steps);
  integrate_cmd->add_option("--u0", integ.u0, "cubic initial value");
  integrate_cmd->add_option("--u0-sweep", integ.u0_sweep,
                            "cubic: N equispaced initial values in (0, 1)");
  integrate_cmd->add_option("--mu", integ.mu);
  integrate_cmd->add_option("--m", integ.m);
  integrate_cmd->add_option("--dx", integ.dx);
  integrate_cmd->add_flag("--find-max-dt", integ.find_max_dt);
  integrate_cmd->add_option("--dt-max", integ.dt_max, "upper end of the dt search");
  integrate_cmd->add_option("--out", integ.out_path, "trajectory CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*optimize) return cmd_optimize(opt, out);
    if (*region) return cmd_region(reg, out);
    if (*certify) return cmd_certify(cert, out);
    if (*integrate_cmd) return cmd_integrate(integ, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DocumentError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}

}  // namespace ssplmm::cli

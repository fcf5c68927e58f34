// Copyright 2026 The QCL Authors
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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcl/objectives.hpp"
#include "qcl/problems.hpp"

namespace qcl {

/// Knobs for the gradient-flow integrator. Error control is absolute-only:
/// a trial step is accepted when the max-abs embedded error estimate is
/// within tau.
struct FlowOptions {
  double tau = 1e-8;
  std::optional<double> gamma;  // +1 maximize, -1 minimize; defaults from
                                // the objective's direction
  std::optional<double> eta_override;
  long max_iterations = 100000;
  double initial_step = 0.1;
  double min_step = 1e-14;
  // Objective decreases up to this magnitude after an accepted step are
  // ignored rather than counted as search failure. The default counts any
  // representable decrease, which is what separates trapped searches from
  // converging ones in practice; raise it to tolerate round-off wiggle.
  double monotone_jitter = 0.0;
};

enum class FlowStatus {
  Converged,          // objective within eta of the relevant bound
  FailedNonMonotone,  // objective moved the wrong way after an accepted step
  MaxIterations,
  StepUnderflow,
};

std::string to_string(FlowStatus s);
FlowStatus flow_status_from_string(const std::string& s);

/// One row of the optional per-run trace file.
struct TraceRow {
  long step = 0;
  double s = 0.0;
  double j = 0.0;
  double step_size = 0.0;
  double grad_norm = 0.0;
};

struct OptimizationResult {
  FlowStatus status = FlowStatus::MaxIterations;
  long iterations = 0;  // accepted steps; search effort
  long rejected_steps = 0;
  std::vector<double> j_trace;  // objective after each accepted step
  ControlField final_field;
  std::optional<double> sigma_opt;  // RFS of the final field, when defined
  double j_initial = 0.0;
  double j_final = 0.0;
  double max_unitarity_defect = 0.0;  // of U(T), over accepted evaluations
};

/// Objective value and gradient on a flat parameter vector. Used by the
/// integrator so tests can drive it with synthetic functionals.
using ValueAndGradient =
    std::function<double(const RVec& y, RVec& grad_out)>;

struct GenericFlowResult {
  FlowStatus status = FlowStatus::MaxIterations;
  long iterations = 0;
  long rejected_steps = 0;
  std::vector<double> j_trace;
  RVec y;
  double j_initial = 0.0;
  double j_final = 0.0;
  std::vector<TraceRow> trace;
};

/// Integrates dy/ds = gamma * grad J(y) with the Dormand-Prince 4(5) pair
/// until the stopping rules fire, in order: convergence, monotonicity
/// failure, iteration cap, step underflow.
GenericFlowResult integrate_gradient_flow(const ValueAndGradient& f,
                                          const RVec& y0, double gamma,
                                          const LandscapeBounds& bounds,
                                          const FlowOptions& opts,
                                          bool keep_trace = false);

/// Runs the gradient flow for a control problem from an initial field.
OptimizationResult optimize(const ControlProblem& problem,
                            const ControlField& field0,
                            const FlowOptions& opts,
                            std::vector<TraceRow>* trace = nullptr);

/// Plain adaptive RK45 integration of dy/ds = f(y) to s_end with the same
/// pair and controller as the flow; self-test hook for the stepper.
RVec rk45_integrate_to(const std::function<RVec(const RVec&)>& f,
                       const RVec& y0, double s_end, const FlowOptions& opts);

void write_trace_csv(const std::vector<TraceRow>& rows,
                     const std::string& path);

}  // namespace qcl

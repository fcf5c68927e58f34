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

#include "qcl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qcl/fields.hpp"
#include "qcl/io.hpp"

namespace qcl {

namespace {

// Dormand-Prince 4(5) tableau. Stage 7 is the derivative at the new point
// (FSAL), reused as stage 1 of the next step.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0,
                 kB4 = 125.0 / 192.0, kB5 = -2187.0 / 6784.0,
                 kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kShrinkCap = 0.2;
constexpr double kGrowthCap = 5.0;

double step_factor(double tau, double err_norm) {
  if (err_norm == 0.0) return kGrowthCap;
  return std::clamp(kSafety * std::pow(tau / err_norm, 0.2), kShrinkCap,
                    kGrowthCap);
}

struct Stages {
  RVec k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
  explicit Stages(Eigen::Index n)
      : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n),
        err(n) {}
};

// One Dormand-Prince trial from y (derivative k1 already evaluated).
// Fills ynew, k7 = f(ynew) and the embedded error estimate.
template <typename Rhs>
void dp_trial(const Rhs& f, const RVec& y, double h, Stages& st) {
  st.ytmp = y + (h * kA21) * st.k1;
  f(st.ytmp, st.k2);
  st.ytmp = y + h * (kA31 * st.k1 + kA32 * st.k2);
  f(st.ytmp, st.k3);
  st.ytmp = y + h * (kA41 * st.k1 + kA42 * st.k2 + kA43 * st.k3);
  f(st.ytmp, st.k4);
  st.ytmp = y + h * (kA51 * st.k1 + kA52 * st.k2 + kA53 * st.k3 +
                     kA54 * st.k4);
  f(st.ytmp, st.k5);
  st.ytmp = y + h * (kA61 * st.k1 + kA62 * st.k2 + kA63 * st.k3 +
                     kA64 * st.k4 + kA65 * st.k5);
  f(st.ytmp, st.k6);
  st.ynew = y + h * (kB1 * st.k1 + kB3 * st.k3 + kB4 * st.k4 + kB5 * st.k5 +
                     kB6 * st.k6);
  f(st.ynew, st.k7);
  st.err = h * (kE1 * st.k1 + kE3 * st.k3 + kE4 * st.k4 + kE5 * st.k5 +
                kE6 * st.k6 + kE7 * st.k7);
}

void check_options(const FlowOptions& opts) {
  if (!(opts.tau > 0.0)) throw ConfigInvalid("flow: tau must be positive");
  if (opts.max_iterations < 1) {
    throw ConfigInvalid("flow: max_iterations must be >= 1");
  }
  if (!(opts.min_step < opts.initial_step)) {
    throw ConfigInvalid("flow: min_step must be below initial_step");
  }
  if (opts.gamma && std::abs(*opts.gamma) != 1.0) {
    throw ConfigInvalid("flow: gamma must have magnitude 1");
  }
  if (opts.monotone_jitter < 0.0) {
    throw ConfigInvalid("flow: monotone_jitter must be non-negative");
  }
}

}  // namespace

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::Converged: return "Converged";
    case FlowStatus::FailedNonMonotone: return "FailedNonMonotone";
    case FlowStatus::MaxIterations: return "MaxIterations";
    case FlowStatus::StepUnderflow: return "StepUnderflow";
  }
  return "Unknown";
}

FlowStatus flow_status_from_string(const std::string& s) {
  if (s == "Converged") return FlowStatus::Converged;
  if (s == "FailedNonMonotone") return FlowStatus::FailedNonMonotone;
  if (s == "MaxIterations") return FlowStatus::MaxIterations;
  if (s == "StepUnderflow") return FlowStatus::StepUnderflow;
  throw ConfigInvalid("unknown flow status: " + s);
}

GenericFlowResult integrate_gradient_flow(const ValueAndGradient& f,
                                          const RVec& y0, double gamma,
                                          const LandscapeBounds& bounds,
                                          const FlowOptions& opts,
                                          bool keep_trace) {
  check_options(opts);
  if (std::abs(gamma) != 1.0) {
    throw ConfigInvalid("flow: gamma must be +1 or -1");
  }
  const bool maximizing = gamma > 0.0;
  const double eta = opts.eta_override.value_or(bounds.eta);
  auto converged = [&](double j) {
    return maximizing ? (j >= bounds.j_max - eta) : (j <= bounds.j_min + eta);
  };

  GenericFlowResult res;
  res.y = y0;
  Stages st(y0.size());

  RVec grad(y0.size());
  double j_here = f(res.y, grad);
  res.j_initial = j_here;
  res.j_final = j_here;
  if (converged(j_here)) {
    res.status = FlowStatus::Converged;
    return res;
  }
  st.k1 = gamma * grad;

  // RHS adapter: objective value at intermediate stages is not needed.
  double j_new = 0.0;
  auto rhs = [&](const RVec& y, RVec& dy) {
    j_new = f(y, dy);
    dy *= gamma;
  };

  double h = opts.initial_step;
  double s = 0.0;
  while (true) {
    dp_trial(rhs, res.y, h, st);
    const double err_norm =
        st.err.size() > 0 ? st.err.cwiseAbs().maxCoeff() : 0.0;
    const bool accept = err_norm <= opts.tau;
    if (accept) {
      s += h;
      res.y.swap(st.ynew);
      st.k1.swap(st.k7);  // FSAL: k7 was evaluated at the accepted point
      const double j_prev = res.j_final;
      res.j_final = j_new;
      ++res.iterations;
      res.j_trace.push_back(j_new);
      if (keep_trace) {
        res.trace.push_back(
            TraceRow{res.iterations, s, j_new, h, st.k1.norm()});
      }
      if (converged(j_new)) {
        res.status = FlowStatus::Converged;
        return res;
      }
      const bool decreased =
          maximizing ? (j_new < j_prev - opts.monotone_jitter)
                     : (j_new > j_prev + opts.monotone_jitter);
      if (decreased) {
        res.status = FlowStatus::FailedNonMonotone;
        return res;
      }
      if (res.iterations >= opts.max_iterations) {
        res.status = FlowStatus::MaxIterations;
        return res;
      }
    } else {
      ++res.rejected_steps;
    }
    h *= step_factor(opts.tau, err_norm);
    if (h < opts.min_step) {
      res.status = FlowStatus::StepUnderflow;
      return res;
    }
  }
}

OptimizationResult optimize(const ControlProblem& problem,
                            const ControlField& field0,
                            const FlowOptions& opts,
                            std::vector<TraceRow>* trace) {
  const QuantumSystem& sys = problem.system;
  if (field0.channels() != sys.channels() ||
      field0.slices() != problem.l_slices ||
      std::abs(field0.t_final - problem.t_final) > 0.0) {
    throw DimensionMismatch("optimize: initial field does not match problem");
  }

  const double gamma_default =
      problem.objective.direction == Direction::Maximize ? 1.0 : -1.0;
  const double gamma = opts.gamma.value_or(gamma_default);
  if (gamma != gamma_default) {
    throw ConfigInvalid("optimize: gamma contradicts objective direction");
  }

  const int K = field0.channels();
  const int L = field0.slices();
  const double dt = field0.dt();
  const LandscapeBounds bounds = kinematic_bounds(problem.objective);

  double max_defect = 0.0;
  ControlField work = field0;
  const ValueAndGradient f = [&](const RVec& y, RVec& grad_out) -> double {
    work.values = Eigen::Map<const RMat>(y.data(), K, L);
    const PropagationRecord rec = propagate(sys, work);
    max_defect = std::max(max_defect, unitarity_defect(rec.final_u()));
    const RMat g = gradient(problem.objective, sys, rec, dt);
    grad_out = Eigen::Map<const RVec>(g.data(), g.size());
    return evaluate(problem.objective, rec.final_u());
  };

  const RVec y0 = Eigen::Map<const RVec>(field0.values.data(),
                                         field0.values.size());
  GenericFlowResult gen =
      integrate_gradient_flow(f, y0, gamma, bounds, opts, trace != nullptr);

  OptimizationResult res;
  res.status = gen.status;
  res.iterations = gen.iterations;
  res.rejected_steps = gen.rejected_steps;
  res.j_trace = std::move(gen.j_trace);
  res.final_field.t_final = field0.t_final;
  res.final_field.values = Eigen::Map<const RMat>(gen.y.data(), K, L);
  res.j_initial = gen.j_initial;
  res.j_final = gen.j_final;
  res.max_unitarity_defect = max_defect;
  try {
    res.sigma_opt = rfs(res.final_field, sys);
  } catch (const NoValidTransitions&) {
    res.sigma_opt = std::nullopt;
  }
  if (trace != nullptr) *trace = std::move(gen.trace);
  return res;
}

RVec rk45_integrate_to(const std::function<RVec(const RVec&)>& f,
                       const RVec& y0, double s_end,
                       const FlowOptions& opts) {
  check_options(opts);
  RVec y = y0;
  Stages st(y0.size());
  auto rhs = [&](const RVec& yy, RVec& dy) { dy = f(yy); };
  rhs(y, st.k1);
  double s = 0.0;
  double h = std::min(opts.initial_step, s_end);
  while (s < s_end) {
    h = std::min(h, s_end - s);
    dp_trial(rhs, y, h, st);
    const double err_norm =
        st.err.size() > 0 ? st.err.cwiseAbs().maxCoeff() : 0.0;
    if (err_norm <= opts.tau) {
      s += h;
      y.swap(st.ynew);
      st.k1.swap(st.k7);
    }
    h *= step_factor(opts.tau, err_norm);
    if (h < opts.min_step) {
      throw ConvergenceFailure("rk45_integrate_to: step underflow");
    }
  }
  return y;
}

void write_trace_csv(const std::vector<TraceRow>& rows,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_trace_csv: cannot open " + path);
  out << "step,s,J,step_size,grad_norm\n";
  for (const TraceRow& r : rows) {
    out << r.step << ',' << fmt_double(r.s) << ',' << fmt_double(r.j) << ','
        << fmt_double(r.step_size) << ',' << fmt_double(r.grad_norm) << '\n';
  }
}

}  // namespace qcl

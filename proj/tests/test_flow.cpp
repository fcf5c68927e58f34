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

#include <cmath>

#include "doctest.h"
#include "qcl/fields.hpp"
#include "qcl/flow.hpp"
#include "qcl/harness.hpp"
#include "testutil.hpp"

using namespace qcl;

TEST_CASE("stepper: scalar exponential oracle") {
  FlowOptions opts;
  opts.tau = 1e-8;
  RVec y0(1);
  y0(0) = 1.0;
  const RVec y =
      rk45_integrate_to([](const RVec& y) { return y; }, y0, 1.0, opts);
  CHECK(std::abs(y(0) - std::exp(1.0)) <= 10.0 * opts.tau);
}

TEST_CASE("stepper: tolerance steers accuracy") {
  RVec y0(2);
  y0 << 1.0, 0.0;
  // Harmonic oscillator; exact solution (cos s, -sin s).
  const auto f = [](const RVec& y) {
    RVec dy(2);
    dy << y(1), -y(0);
    return dy;
  };
  FlowOptions loose, tight;
  loose.tau = 1e-4;
  tight.tau = 1e-10;
  const double s_end = 10.0;
  const RVec yl = rk45_integrate_to(f, y0, s_end, loose);
  const RVec yt = rk45_integrate_to(f, y0, s_end, tight);
  const double el = std::abs(yl(0) - std::cos(s_end));
  const double et = std::abs(yt(0) - std::cos(s_end));
  CHECK(et < el);
  CHECK(et < 1e-8);
}

TEST_CASE("optimize: problem A from sigma0 = 1 converges monotonically") {
  const ControlProblem pb = problem_a();
  const ControlField f0 = initial_field_for(pb, 1.0, 42);
  FlowOptions opts;
  const OptimizationResult res = optimize(pb, f0, opts);

  CHECK(res.status == FlowStatus::Converged);
  CHECK(res.j_final >= 0.4997);
  CHECK(res.iterations == static_cast<long>(res.j_trace.size()));
  CHECK(res.max_unitarity_defect < 1e-10);
  CHECK(res.sigma_opt.has_value());

  double prev = res.j_initial;
  for (double j : res.j_trace) {
    CHECK(j >= prev - opts.monotone_jitter);
    prev = j;
  }
}

TEST_CASE("optimize: deterministic bit-for-bit") {
  const ControlProblem pb = problem_a();
  const ControlField f0 = initial_field_for(pb, 1.0, 7);
  FlowOptions opts;
  const OptimizationResult r1 = optimize(pb, f0, opts);
  const OptimizationResult r2 = optimize(pb, f0, opts);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.j_final == r2.j_final);
  CHECK((r1.final_field.values - r2.final_field.values)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  REQUIRE(r1.j_trace.size() == r2.j_trace.size());
  for (size_t i = 0; i < r1.j_trace.size(); ++i) {
    CHECK(r1.j_trace[i] == r2.j_trace[i]);
  }
}

TEST_CASE("optimize: gamma symmetry (maximize J vs minimize -J)") {
  const ControlProblem pb = problem_a();
  ControlProblem mirrored = pb;
  mirrored.objective =
      make_observable(pb.objective.rho0, -pb.objective.theta,
                      Direction::Minimize);
  mirrored.trap_value = -*pb.trap_value;

  const ControlField f0 = initial_field_for(pb, 1.0, 13);
  FlowOptions opts;
  const OptimizationResult up = optimize(pb, f0, opts);
  const OptimizationResult down = optimize(mirrored, f0, opts);

  CHECK(up.status == FlowStatus::Converged);
  CHECK(down.status == FlowStatus::Converged);
  REQUIRE(up.j_trace.size() == down.j_trace.size());
  for (size_t i = 0; i < up.j_trace.size(); ++i) {
    CHECK(up.j_trace[i] == doctest::Approx(-down.j_trace[i]).epsilon(1e-12));
  }
  CHECK((up.final_field.values - down.final_field.values)
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("optimize: explicit gamma must match the direction") {
  const ControlProblem pb = problem_a();
  const ControlField f0 = initial_field_for(pb, 1.0, 3);
  FlowOptions opts;
  opts.gamma = -1.0;  // problem A maximizes
  CHECK_THROWS_AS(optimize(pb, f0, opts), ConfigInvalid);
  opts.gamma = 0.5;
  CHECK_THROWS_AS(optimize(pb, f0, opts), ConfigInvalid);
}

TEST_CASE("optimize: iteration cap is reported as MaxIterations") {
  const ControlProblem pb = problem_a();
  const ControlField f0 = initial_field_for(pb, 1.0, 4);
  FlowOptions opts;
  opts.max_iterations = 5;
  const OptimizationResult res = optimize(pb, f0, opts);
  CHECK(res.status == FlowStatus::MaxIterations);
  CHECK(res.iterations == 5);
}

TEST_CASE("optimize: immediate convergence gives an empty trace") {
  const ControlProblem pb = problem_a();
  const ControlField f0 = initial_field_for(pb, 1.0, 4);
  FlowOptions opts;
  opts.eta_override = 1.0;  // anything satisfies J >= Jmax - 1
  const OptimizationResult res = optimize(pb, f0, opts);
  CHECK(res.status == FlowStatus::Converged);
  CHECK(res.iterations == 0);
  CHECK(res.j_trace.empty());
  CHECK(res.j_final == res.j_initial);
}

TEST_CASE("optimize: trace rows are consistent") {
  const ControlProblem pb = problem_a();
  const ControlField f0 = initial_field_for(pb, 1.0, 21);
  FlowOptions opts;
  std::vector<TraceRow> trace;
  const OptimizationResult res = optimize(pb, f0, opts, &trace);
  REQUIRE(trace.size() == res.j_trace.size());
  for (size_t i = 0; i < trace.size(); ++i) {
    CHECK(trace[i].step == static_cast<long>(i + 1));
    CHECK(trace[i].j == res.j_trace[i]);
    CHECK(trace[i].step_size > 0.0);
    CHECK(trace[i].grad_norm >= 0.0);
  }
  for (size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i].s > trace[i - 1].s);
  }
}

TEST_CASE("flow: loose tolerance fails more often near the trap") {
  // Fixed seeds at sigma0 = 1e-3 on problem A: tau = 1e-2 must produce
  // strictly more failures than tau = 1e-8 (Table III direction).
  const ControlProblem pb = problem_a();
  int fail_loose = 0, fail_tight = 0;
  for (int k = 0; k < 20; ++k) {
    const ControlField f0 = initial_field_for(pb, 1e-3, 1000 + k);
    FlowOptions loose;
    loose.tau = 1e-2;
    loose.monotone_jitter = 0.0;
    if (optimize(pb, f0, loose).status != FlowStatus::Converged) {
      ++fail_loose;
    }
    FlowOptions tight;
    tight.tau = 1e-8;
    tight.monotone_jitter = 0.0;
    if (optimize(pb, f0, tight).status != FlowStatus::Converged) {
      ++fail_tight;
    }
  }
  CHECK(fail_loose > fail_tight);
  CHECK(fail_loose >= 15);  // loose tolerance traps essentially always here
}

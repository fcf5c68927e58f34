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
#include "qcl/problems.hpp"
#include "qcl/rng.hpp"

using namespace qcl;

TEST_CASE("mean_amplitude arithmetic") {
  ControlField f;
  f.t_final = 4.0;
  f.values = RMat(1, 4);
  f.values << 1.0, -1.0, 2.0, 0.0;
  CHECK(mean_amplitude(f)(0) == doctest::Approx(1.0));

  f.values.setZero();
  CHECK(mean_amplitude(f)(0) == 0.0);

  f.values.setConstant(-3.25);
  CHECK(mean_amplitude(f)(0) == doctest::Approx(3.25));
}

TEST_CASE("rfs: hand-evaluated value for problem A") {
  const ControlProblem pb = problem_a();
  ControlField f = zero_field(1, 10, pb.t_final);
  f.values.setConstant(1.0);
  // Transitions (1,3) and (2,3): (0.5/30 + 1/20)/2 = 1/30.
  CHECK(rfs(f, pb.system) == doctest::Approx(1.0 / 30.0).epsilon(1e-12));

  ControlField z = pb.zero();
  CHECK(rfs(z, pb.system) == 0.0);

  // Scaling homogeneity.
  ControlField g = f;
  g.values *= -7.5;
  CHECK(rfs(g, pb.system) ==
        doctest::Approx(7.5 / 30.0).epsilon(1e-12));
}

TEST_CASE("rescale_to_rfs") {
  const ControlProblem pb = problem_a();
  ControlField f = zero_field(1, 16, pb.t_final);
  f.values.setConstant(1.0);

  const ControlField r = rescale_to_rfs(f, pb.system, 1.0);
  CHECK(rfs(r, pb.system) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.values(0, 0) == doctest::Approx(30.0).epsilon(1e-12));

  const double cur = rfs(f, pb.system);
  const ControlField same = rescale_to_rfs(f, pb.system, cur);
  CHECK((same.values - f.values).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(rescale_to_rfs(pb.zero(), pb.system, 1.0), ZeroFieldError);
}

TEST_CASE("rfs requires a coupled non-degenerate pair") {
  // Two degenerate levels coupled off-diagonally: no usable transition.
  CMat h0 = CMat::Zero(2, 2);
  CMat mu = CMat::Zero(2, 2);
  mu(0, 1) = mu(1, 0) = 1.0;
  const QuantumSystem sys = make_system(h0, {mu});
  ControlField f = zero_field(1, 4, 1.0);
  f.values.setConstant(1.0);
  CHECK_THROWS_AS(rfs(f, sys), NoValidTransitions);
}

TEST_CASE("synthesize: deterministic, on-target, draws in range") {
  const ControlProblem pb = problem_a();
  const FieldInitSpec spec = rfs_init_spec(pb.system, pb.t_final, 1.0, 99);
  CHECK(spec.omega_min == doctest::Approx(10.0));
  CHECK(spec.omega_max == doctest::Approx(30.0));
  CHECK(spec.zeta == doctest::Approx(0.8));

  std::vector<FieldDraw> log;
  const ControlField f1 =
      synthesize(spec, pb.system, pb.t_final, pb.l_slices, &log);
  const ControlField f2 = synthesize(spec, pb.system, pb.t_final,
                                     pb.l_slices);
  CHECK((f1.values - f2.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rfs(f1, pb.system) == doctest::Approx(1.0).epsilon(1e-12));

  REQUIRE(log.size() == 20);
  for (const FieldDraw& d : log) {
    CHECK(d.omega >= spec.omega_min);
    CHECK(d.omega < spec.omega_max);
    CHECK(d.amplitude >= 0.0);
    CHECK(d.amplitude < 1.0);
  }

  // Reconstruct the field from the logged draws.
  const double a0 = f1.values(0, 0) /
                    [&] {
                      const double t = pb.t_final / pb.l_slices;
                      double sum = 0.0;
                      for (const FieldDraw& d : log) {
                        sum += d.amplitude * std::cos(d.omega * t);
                      }
                      const double z = pb.t_final / 10.0;
                      return std::exp(-std::pow(t - pb.t_final / 2, 2) /
                                      (2 * z * z)) *
                             sum;
                    }();
  for (int l = 0; l < pb.l_slices; ++l) {
    const double t = (l + 1) * pb.t_final / pb.l_slices;
    double sum = 0.0;
    for (const FieldDraw& d : log) sum += d.amplitude * std::cos(d.omega * t);
    const double z = pb.t_final / 10.0;
    const double env =
        std::exp(-std::pow(t - pb.t_final / 2, 2) / (2 * z * z));
    CHECK(f1.values(0, l) ==
          doctest::Approx(a0 * env * sum).epsilon(1e-12));
  }
}

TEST_CASE("synthesize: envelope suppresses the ends") {
  // With zeta = T/10 the envelope at t = 0 or T is exp(-12.5) ~ 3.7e-6 of
  // the peak, so end slices are tiny relative to the middle.
  CHECK(std::exp(-12.5) == doctest::Approx(3.7267e-6).epsilon(1e-4));
  const ControlProblem pb = problem_a();
  const ControlField f =
      synthesize(rfs_init_spec(pb.system, pb.t_final, 1.0, 5), pb.system,
                 pb.t_final, pb.l_slices);
  const double mid = f.values.cwiseAbs().maxCoeff();
  CHECK(std::abs(f.values(0, pb.l_slices - 1)) < 1e-4 * mid);
}

TEST_CASE("synthesize: target RFS holds across seeds and problems") {
  const std::vector<ControlProblem> pbs = {problem_a(), problem_b(),
                                           problem_c(), problem_d(),
                                           problem_e(), problem_f(3)};
  for (const ControlProblem& pb : pbs) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const ControlField f =
          synthesize(rfs_init_spec(pb.system, pb.t_final, 0.01, seed),
                     pb.system, pb.t_final, 64);
      const double s = rfs(f, pb.system);
      CHECK(std::abs(s - 0.01) <= 1e-12 * 0.01);
    }
  }
}

TEST_CASE("synthesize: channels are independent and permute with order") {
  // Two-channel synthetic system.
  CMat h0 = CMat::Zero(2, 2);
  h0(1, 1) = 1.0;
  CMat mux = CMat::Zero(2, 2);
  mux(0, 1) = mux(1, 0) = 1.0;
  CMat muy = CMat::Zero(2, 2);
  muy(0, 1) = Complex(0, -0.5);
  muy(1, 0) = Complex(0, 0.5);
  const QuantumSystem sys = make_system(h0, {mux, muy});
  const QuantumSystem swapped = make_system(h0, {muy, mux});

  const FieldInitSpec spec = rfs_init_spec(sys, 10.0, 0.1, 7);
  const FieldInitSpec spec_swapped = rfs_init_spec(swapped, 10.0, 0.1, 7);
  const ControlField f = synthesize(spec, sys, 10.0, 32);
  const ControlField g = synthesize(spec_swapped, swapped, 10.0, 32);

  // Channel streams are bound to the channel index, so the raw shapes are
  // identical; only the shared RFS normalization differs when couplings
  // are permuted. The two fields must be globally proportional and each
  // on target for its own system.
  const double ratio = f.values(0, 16) / g.values(0, 16);
  CHECK((f.values - ratio * g.values).cwiseAbs().maxCoeff() <
        1e-12 * f.values.cwiseAbs().maxCoeff());
  CHECK(rfs(f, sys) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rfs(g, swapped) == doctest::Approx(0.1).epsilon(1e-12));

  // Different seeds change every channel.
  FieldInitSpec spec2 = spec;
  spec2.seed = 8;
  const ControlField h = synthesize(spec2, sys, 10.0, 32);
  CHECK((f.values.row(0) - h.values.row(0)).cwiseAbs().maxCoeff() > 0.0);
  CHECK((f.values.row(1) - h.values.row(1)).cwiseAbs().maxCoeff() > 0.0);
}

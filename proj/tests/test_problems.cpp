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
#include "json.hpp"
#include "qcl/problems.hpp"
#include "testutil.hpp"

using namespace qcl;

namespace {

double zero_field_value(const ControlProblem& pb) {
  return evaluate(pb.objective, final_propagator(pb.system, pb.zero()));
}

double zero_field_grad_max(const ControlProblem& pb) {
  const PropagationRecord rec = propagate(pb.system, pb.zero());
  return gradient(pb.objective, pb.system, rec, pb.dt())
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace

TEST_CASE("trap values match the known zero-field objective") {
  CHECK(*problem_a().trap_value == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(*problem_b().trap_value == doctest::Approx(0.0));
  const double c_trap = std::cos(1.5) * std::cos(1.5);
  CHECK(*problem_c().trap_value == doctest::Approx(c_trap).epsilon(1e-12));
  CHECK(*problem_d().trap_value == doctest::Approx(0.25).epsilon(1e-12));
  // The published 5/12 for problem E is the gate-fidelity complement of
  // the critical value; the objective itself sits at 7/12 there.
  CHECK(*problem_e().trap_value ==
        doctest::Approx(7.0 / 12.0).epsilon(1e-12));

  for (const ControlProblem& pb :
       {problem_a(), problem_b(), problem_c(), problem_d(), problem_e(),
        problem_f(11)}) {
    CHECK(std::abs(zero_field_value(pb) - *pb.trap_value) < 1e-10);
  }
}

TEST_CASE("zero field is a critical point of every catalog landscape") {
  for (const ControlProblem& pb :
       {problem_a(), problem_b(), problem_c(), problem_d(), problem_e(),
        problem_f(1), problem_f(2), problem_f(3)}) {
    CHECK(zero_field_grad_max(pb) <= 1e-12);
  }
}

TEST_CASE("problem D inequality chain") {
  const double b = 3.0, theta = M_PI / 3.0;
  const double lhs = b * b * std::cos(theta) * std::cos(theta);
  const double mid = (2.0 / M_PI) * std::sin(2.0 * theta);
  CHECK(lhs == doctest::Approx(2.25));
  CHECK(mid == doctest::Approx(0.5513).epsilon(1e-3));
  CHECK(lhs > mid);
  CHECK(mid > 0.0);
  CHECK(problem_d().t_final == doctest::Approx(100.0));
}

TEST_CASE("problem E is locked to T = pi/alpha") {
  const ControlProblem pb = problem_e();
  CHECK(pb.t_final == doctest::Approx(1000.0));
  CHECK(pb.l_slices == 511);
  CHECK(pb.objective.direction == Direction::Minimize);
}

TEST_CASE("catalog Hamiltonians are diagonal and couplings Hermitian") {
  for (const ControlProblem& pb :
       {problem_a(), problem_b(), problem_c(), problem_d(), problem_e(),
        problem_f(7), problem_g(10.0)}) {
    for (Eigen::Index j = 0; j < pb.system.h0.rows(); ++j) {
      for (Eigen::Index k = 0; k < pb.system.h0.cols(); ++k) {
        if (j != k) CHECK(std::abs(pb.system.h0(j, k)) == 0.0);
      }
    }
    for (const CMat& c : pb.system.couplings) {
      CHECK(is_hermitian(c));
    }
  }
}

TEST_CASE("problem F: deterministic per seed, diagonal mu condition") {
  const ControlProblem f1 = problem_f(1234);
  const ControlProblem f2 = problem_f(1234);
  CHECK((f1.objective.theta - f2.objective.theta).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((f1.objective.rho0 - f2.objective.rho0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(*f1.trap_value == *f2.trap_value);

  const ControlProblem f3 = problem_f(9999);
  CHECK((f1.objective.rho0 - f3.objective.rho0).cwiseAbs().maxCoeff() > 0.0);

  // <i|mu|i> = <j|mu|j> = 0 holds for the fixed coupling matrix.
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(f1.system.couplings[0](j, j)) == 0.0);
  }

  // rho0 is a proper pure state.
  const EigenDecomposition eig = hermitian_eig(f1.objective.rho0);
  CHECK(eig.values(2) == doctest::Approx(1.0));
  CHECK(std::abs(eig.values(0)) < 1e-12);
}

TEST_CASE("problem G: target gate and couplings") {
  const ControlProblem pb = problem_g(10.0);
  CHECK(pb.system.dim() == 8);
  CHECK(pb.system.channels() == 6);
  CHECK(pb.l_slices == 140);
  CHECK(pb.system.sign == CouplingSign::Plus);

  const CMat& w = pb.objective.target_gate;
  CHECK(unitarity_defect(w) < 1e-12);
  CHECK(std::abs(evaluate(pb.objective, w)) < 1e-12);

  // Both exponent conventions give a unitary target; they are different
  // gates but the objective treats each consistently.
  const ControlProblem pb1 = problem_g(10.0, QftIndexing::OneBased);
  CHECK(unitarity_defect(pb1.objective.target_gate) < 1e-12);
  CHECK((pb1.objective.target_gate - w).cwiseAbs().maxCoeff() > 0.1);

  CHECK_THROWS_AS(problem_g(-1.0), InvalidProblem);
}

TEST_CASE("catalog JSON lists all seven problems") {
  const nlohmann::json arr = nlohmann::json::parse(catalog_json());
  REQUIRE(arr.size() == 7);
  CHECK(arr[0]["label"] == "A");
  CHECK(arr[0]["trap_value"] == doctest::Approx(0.3));
  CHECK(arr[6]["label"] == "G");
  CHECK(!arr[6].contains("trap_value"));
  CHECK(arr[4]["trap_value"] == doctest::Approx(7.0 / 12.0));
}

TEST_CASE("make_problem guards") {
  ProblemOptions opts;
  opts.t_final = 42.0;
  CHECK_THROWS_AS(make_problem(ProblemLabel::A, opts), ConfigInvalid);
  CHECK_NOTHROW(make_problem(ProblemLabel::G, opts));
}

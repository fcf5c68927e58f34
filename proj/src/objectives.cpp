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

#include "qcl/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace qcl {

namespace {

constexpr double kStateTol = 1e-10;

void require_normalized(const CVec& v, const char* what) {
  if (v.size() < 1 || !v.allFinite()) {
    throw InvalidObjective(std::string(what) + ": empty or non-finite state");
  }
  if (std::abs(v.norm() - 1.0) > kStateTol) {
    throw InvalidObjective(std::string(what) + ": state is not normalized");
  }
}

}  // namespace

int Objective::dim() const {
  switch (kind) {
    case ObjectiveKind::StateTransition:
      return static_cast<int>(initial_state.size());
    case ObjectiveKind::Observable:
      return static_cast<int>(rho0.rows());
    case ObjectiveKind::GatePhaseDep:
    case ObjectiveKind::GatePhaseIndep:
      return static_cast<int>(target_gate.rows());
  }
  return 0;
}

Objective make_state_transition(CVec initial, CVec final_state,
                                Direction dir) {
  require_normalized(initial, "initial state");
  require_normalized(final_state, "final state");
  if (initial.size() != final_state.size()) {
    throw DimensionMismatch("state transition: state dimensions differ");
  }
  Objective obj;
  obj.kind = ObjectiveKind::StateTransition;
  obj.direction = dir;
  obj.initial_state = std::move(initial);
  obj.final_state = std::move(final_state);
  return obj;
}

Objective make_observable(CMat rho0, CMat theta, Direction dir) {
  if (rho0.rows() != rho0.cols() || theta.rows() != theta.cols() ||
      rho0.rows() != theta.rows()) {
    throw DimensionMismatch("observable: operator shape mismatch");
  }
  if (!all_finite(rho0) || !is_hermitian(rho0)) {
    throw InvalidObjective("observable: rho0 is not Hermitian");
  }
  if (!all_finite(theta) || !is_hermitian(theta)) {
    throw InvalidObjective("observable: theta is not Hermitian");
  }
  if (std::abs(rho0.trace().real() - 1.0) > kStateTol ||
      std::abs(rho0.trace().imag()) > kStateTol) {
    throw InvalidObjective("observable: Tr(rho0) != 1");
  }
  const EigenDecomposition eig = hermitian_eig(rho0);
  if (eig.values.minCoeff() < -kStateTol) {
    throw InvalidObjective("observable: rho0 is not positive semidefinite");
  }
  Objective obj;
  obj.kind = ObjectiveKind::Observable;
  obj.direction = dir;
  obj.rho0 = std::move(rho0);
  obj.theta = std::move(theta);
  return obj;
}

namespace {

Objective make_gate(CMat w, ObjectiveKind kind, Direction dir) {
  if (w.rows() != w.cols() || w.rows() < 1) {
    throw DimensionMismatch("gate objective: target is not square");
  }
  if (!all_finite(w) || unitarity_defect(w) > 1e-10) {
    throw InvalidObjective("gate objective: target is not unitary");
  }
  Objective obj;
  obj.kind = kind;
  obj.direction = dir;
  obj.target_gate = std::move(w);
  return obj;
}

}  // namespace

Objective make_gate_phase_dep(CMat w, Direction dir) {
  return make_gate(std::move(w), ObjectiveKind::GatePhaseDep, dir);
}

Objective make_gate_phase_indep(CMat w, Direction dir) {
  return make_gate(std::move(w), ObjectiveKind::GatePhaseIndep, dir);
}

LandscapeBounds kinematic_bounds(const Objective& obj) {
  LandscapeBounds b;
  switch (obj.kind) {
    case ObjectiveKind::StateTransition:
    case ObjectiveKind::GatePhaseDep:
    case ObjectiveKind::GatePhaseIndep:
      b.j_min = 0.0;
      b.j_max = 1.0;
      break;
    case ObjectiveKind::Observable: {
      // Rearrangement bound: extremes of Tr(U^dag theta U rho0) over
      // unitary U are sums of sorted eigenvalue products.
      const RVec p = hermitian_eig(obj.rho0).values;  // ascending
      const RVec q = hermitian_eig(obj.theta).values;
      const Eigen::Index n = p.size();
      double lo = 0.0, hi = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        hi += p(i) * q(i);           // aligned sort orders
        lo += p(i) * q(n - 1 - i);   // opposing sort orders
      }
      b.j_min = lo;
      b.j_max = hi;
      break;
    }
  }
  if (!(b.j_min < b.j_max)) {
    throw InvalidObjective("kinematic_bounds: degenerate landscape range");
  }
  b.eta = 0.001 * (b.j_max - b.j_min);
  return b;
}

namespace {

void check_dims(const Objective& obj, const CMat& u_t) {
  if (u_t.rows() != u_t.cols() || obj.dim() != u_t.rows()) {
    throw DimensionMismatch("objective/propagator dimension mismatch");
  }
}

}  // namespace

double evaluate(const Objective& obj, const CMat& u_t) {
  check_dims(obj, u_t);
  const double n = static_cast<double>(u_t.rows());
  switch (obj.kind) {
    case ObjectiveKind::StateTransition: {
      const Complex z = obj.final_state.dot(u_t * obj.initial_state);
      return std::norm(z);
    }
    case ObjectiveKind::Observable: {
      const CMat theta_t = u_t.adjoint() * obj.theta * u_t;
      const Complex t = trace_product(theta_t, obj.rho0);
      if (std::abs(t.imag()) > 1e-10) {
        throw InvalidObjective("observable value has imaginary residue");
      }
      return t.real();
    }
    case ObjectiveKind::GatePhaseDep: {
      const Complex t = trace_product(obj.target_gate.adjoint(), u_t);
      return 0.5 - t.real() / (2.0 * n);
    }
    case ObjectiveKind::GatePhaseIndep: {
      const Complex t = trace_product(obj.target_gate.adjoint(), u_t);
      return 1.0 - std::abs(t) / n;
    }
  }
  throw InvalidObjective("evaluate: unknown objective kind");
}

RMat gradient(const Objective& obj, const QuantumSystem& sys,
              const PropagationRecord& rec, double dt) {
  const int K = sys.channels();
  if (rec.u.empty() || static_cast<int>(rec.mu_t.size()) != K) {
    throw DimensionMismatch("gradient: record does not match system");
  }
  const int L = static_cast<int>(rec.mu_t[0].size());
  const CMat& ut = rec.final_u();
  check_dims(obj, ut);
  const double n = static_cast<double>(ut.rows());

  // Functional-derivative formulas below assume the dipole convention
  // H = H0 - sum eps_i H_i; with the opposite convention the Jacobian of
  // U(T) flips sign, and so does the gradient.
  const double csign = (sys.sign == CouplingSign::Minus) ? 1.0 : -1.0;

  RMat g(K, L);
  switch (obj.kind) {
    case ObjectiveKind::StateTransition: {
      const Complex z = obj.final_state.dot(ut * obj.initial_state);
      const CVec w = ut.adjoint() * obj.final_state;
      for (int i = 0; i < K; ++i) {
        for (int l = 0; l < L; ++l) {
          const Complex inner = obj.initial_state.dot(rec.mu_t[i][l] * w);
          // dot() conjugates its first argument, so inner = <i|mu(t)|w>.
          g(i, l) = csign * dt * 2.0 * (z * inner).imag();
        }
      }
      break;
    }
    case ObjectiveKind::Observable: {
      const CMat m = ut.adjoint() * obj.theta * ut * obj.rho0;
      for (int i = 0; i < K; ++i) {
        for (int l = 0; l < L; ++l) {
          g(i, l) = csign * dt * 2.0 * im_trace_product(m, rec.mu_t[i][l]);
        }
      }
      break;
    }
    case ObjectiveKind::GatePhaseDep: {
      const CMat e = obj.target_gate.adjoint() * ut;
      const double pref = csign * dt / (2.0 * n);
      for (int i = 0; i < K; ++i) {
        for (int l = 0; l < L; ++l) {
          g(i, l) = pref * im_trace_product(e, rec.mu_t[i][l]);
        }
      }
      break;
    }
    case ObjectiveKind::GatePhaseIndep: {
      const CMat e = obj.target_gate.adjoint() * ut;
      const Complex z = e.trace();
      const double zabs = std::abs(z);
      if (zabs < 1e-12) {
        throw PhaseIndepSingularity(
            "gradient of |Tr(W^dag U)| undefined at Tr = 0");
      }
      const double pref = csign * dt / (n * zabs);
      for (int i = 0; i < K; ++i) {
        for (int l = 0; l < L; ++l) {
          const Complex t = trace_product(e, rec.mu_t[i][l]);
          g(i, l) = pref * (std::conj(z) * t).imag();
        }
      }
      break;
    }
  }
  return g;
}

}  // namespace qcl
